#include "nbflow/partition.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "nbflow/errors.hpp"

namespace nbflow {

namespace {

std::vector<std::vector<int>> blocks_from_member(int n, const std::vector<int>& member) {
    int k = member.empty() ? 0 : *std::max_element(member.begin(), member.end()) + 1;
    std::vector<std::vector<int>> blocks(k);
    for (int i = 0; i < n; ++i) blocks[member[i]].push_back(i);
    return blocks;
}

}  // namespace

Partition::Partition(int n, std::vector<std::vector<int>> blocks) : n_(n) {
    if (n < 1) throw DomainError("partition: n must be >= 1");
    std::vector<int> seen(n, -1);
    int count = 0;
    for (auto& b : blocks) {
        if (b.empty()) throw DomainError("partition: empty block");
        std::sort(b.begin(), b.end());
        for (int e : b) {
            if (e < 0 || e >= n)
                throw DomainError("partition: element " + std::to_string(e + 1) +
                                  " out of range 1.." + std::to_string(n));
            if (seen[e] >= 0)
                throw DomainError("partition: element " + std::to_string(e + 1) +
                                  " appears twice");
            seen[e] = 1;
            ++count;
        }
    }
    if (count != n) throw DomainError("partition: blocks do not cover 1.." + std::to_string(n));
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    blocks_ = std::move(blocks);
    member_.assign(n, 0);
    for (int bi = 0; bi < static_cast<int>(blocks_.size()); ++bi)
        for (int e : blocks_[bi]) member_[e] = bi;
}

void Partition::rebuild_from_member() {
    blocks_ = blocks_from_member(n_, member_);
}

Partition Partition::finest(int n) {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(n);
    for (int i = 0; i < n; ++i) blocks.push_back({i});
    return Partition(n, std::move(blocks));
}

Partition Partition::coarsest(int n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return Partition(n, {all});
}

Partition Partition::parse(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.size() < 2 || s.front() != '{' || s.back() != '}')
        throw ParseError("partition: expected \"{...}\", got \"" + std::string(text) + "\"");
    s = s.substr(1, s.size() - 2);
    std::vector<std::vector<int>> blocks;
    std::vector<int> cur;
    std::string num;
    auto flush_num = [&] {
        if (num.empty()) throw ParseError("partition: missing element in \"" + std::string(text) + "\"");
        cur.push_back(std::stoi(num) - 1);  // text labels are 1-based
        num.clear();
    };
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            num.push_back(c);
        } else if (c == ',') {
            flush_num();
        } else if (c == '|') {
            flush_num();
            blocks.push_back(std::move(cur));
            cur.clear();
        } else {
            throw ParseError(std::string("partition: unexpected character '") + c + "'");
        }
    }
    flush_num();
    blocks.push_back(std::move(cur));
    int n = 0;
    for (const auto& b : blocks)
        for (int e : b) n = std::max(n, e + 1);
    try {
        return Partition(n, std::move(blocks));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

int Partition::block_of(int i) const {
    if (i < 0 || i >= n_) throw DomainError("partition: element out of range");
    return member_[i];
}

std::string Partition::str() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (b) out << '|';
        for (std::size_t j = 0; j < blocks_[b].size(); ++j) {
            if (j) out << ',';
            out << blocks_[b][j] + 1;
        }
    }
    out << '}';
    return out.str();
}

bool Partition::operator<(const Partition& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    return member_ < o.member_;
}

std::vector<Partition> enumerate_partitions(int n) {
    if (n < 1 || n > 12)
        throw SizeLimitError("enumerate_partitions: n must be in 1..12, got " + std::to_string(n));
    std::vector<Partition> out;
    // Restricted growth strings a with a[0]=0, a[i] <= 1+max(a[0..i-1]),
    // generated in lexicographic order.
    std::vector<int> a(n, 0), m(n, 0);  // m[i] = max(a[0..i])
    for (;;) {
        Partition p;
        p.n_ = n;
        p.member_ = a;
        p.rebuild_from_member();
        out.push_back(std::move(p));
        int i = n - 1;
        while (i > 0 && a[i] > m[i - 1]) --i;
        if (i == 0) break;
        ++a[i];
        m[i] = std::max(m[i - 1], a[i]);
        for (int j = i + 1; j < n; ++j) {
            a[j] = 0;
            m[j] = m[i];
        }
    }
    return out;
}

namespace {
void check_same_n(const Partition& c, const Partition& d, const char* op) {
    if (c.size() != d.size())
        throw DomainError(std::string(op) + ": partitions of different sets (n=" +
                          std::to_string(c.size()) + " vs n=" + std::to_string(d.size()) + ")");
}
}  // namespace

bool refines(const Partition& c, const Partition& d) {
    check_same_n(c, d, "refines");
    const auto& dm = d.block_index();
    for (const auto& block : c.blocks()) {
        int target = dm[block.front()];
        for (int e : block)
            if (dm[e] != target) return false;
    }
    return true;
}

Partition join(const Partition& c, const Partition& d) {
    check_same_n(c, d, "join");
    const int n = c.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (const auto* p : {&c, &d})
        for (const auto& block : p->blocks())
            for (std::size_t j = 1; j < block.size(); ++j) unite(block[0], block[j]);
    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> blocks;
    for (auto& g : groups)
        if (!g.empty()) blocks.push_back(std::move(g));
    return Partition(n, std::move(blocks));
}

Partition meet(const Partition& c, const Partition& d) {
    check_same_n(c, d, "meet");
    const int n = c.size();
    const auto& cm = c.block_index();
    const auto& dm = d.block_index();
    // Group elements by the pair (block in c, block in d).
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(c.rank()) * d.rank());
    for (int i = 0; i < n; ++i) buckets[static_cast<std::size_t>(cm[i]) * d.rank() + dm[i]].push_back(i);
    std::vector<std::vector<int>> blocks;
    for (auto& b : buckets)
        if (!b.empty()) blocks.push_back(std::move(b));
    return Partition(n, std::move(blocks));
}

bool comparable(const Partition& c, const Partition& d) {
    check_same_n(c, d, "comparable");
    return refines(c, d) || refines(d, c);
}

}  // namespace nbflow
