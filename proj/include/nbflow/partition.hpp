#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nbflow {

/// A set partition of {0,...,n-1} in canonical form: each block sorted
/// ascending, blocks ordered by least element.  Canonical form makes equality
/// structural: two Partition values are equal iff they are the same set
/// partition.  Immutable after construction.
///
/// The text form uses 1-based labels: "{1,2|3}" is the partition of {1,2,3}
/// with blocks {1,2} and {3}.
class Partition {
public:
    Partition(int n, std::vector<std::vector<int>> blocks);

    static Partition finest(int n);    // all singletons
    static Partition coarsest(int n);  // one block

    /// Parse the "{1,2|3}" text form; whitespace is ignored.  The labels must
    /// cover 1..n contiguously; n is inferred.
    static Partition parse(std::string_view text);

    int size() const { return n_; }
    int rank() const { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    /// Index (into blocks()) of the block containing element i.
    int block_of(int i) const;
    /// Block index per element; doubles as the restricted-growth string.
    const std::vector<int>& block_index() const { return member_; }

    std::string str() const;

    bool operator==(const Partition& o) const {
        return n_ == o.n_ && member_ == o.member_;
    }
    bool operator!=(const Partition& o) const { return !(*this == o); }
    /// Restricted-growth-string lexicographic order; also the enumeration order.
    bool operator<(const Partition& o) const;

private:
    Partition() = default;
    int n_ = 0;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> member_;
    friend std::vector<Partition> enumerate_partitions(int n);
    void rebuild_from_member();
};

/// All set partitions of {0..n-1} in canonical (RGS-lexicographic) order.
/// Guarded to 1 <= n <= 12; Bell(12) is the desk-scale ceiling.
std::vector<Partition> enumerate_partitions(int n);

/// c refines d: every block of c is contained in some block of d.
bool refines(const Partition& c, const Partition& d);

/// Least upper bound in refinement order.
Partition join(const Partition& c, const Partition& d);

/// Greatest lower bound: nonempty pairwise block intersections.
Partition meet(const Partition& c, const Partition& d);

/// refines(c,d) || refines(d,c).
bool comparable(const Partition& c, const Partition& d);

}  // namespace nbflow
