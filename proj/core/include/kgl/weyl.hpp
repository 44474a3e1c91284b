#pragma once

#include <string>
#include <vector>

namespace kgl {

// Permutation on {0..n-1}; as a matrix, w e_j = e_{w(j)}.
class WeylPerm {
public:
    explicit WeylPerm(std::vector<int> images);
    static WeylPerm identity(int n);
    // j -> n-1-j, the antidiagonal permutation.
    static WeylPerm longest(int n);

    int n() const { return static_cast<int>(img_.size()); }
    int operator()(int j) const { return img_[static_cast<std::size_t>(j)]; }
    bool is_longest() const;
    WeylPerm inverse() const;

private:
    std::vector<int> img_;
};

// Relevant Weyl element: block diagonal of longest elements, one block per
// part of a composition of n.
struct RelevantWeyl {
    std::vector<int> composition;

    int n() const;
    WeylPerm permutation() const;
    std::string str() const;
};

// All 2^{n-1} relevant elements, one per composition of n (lexicographic by
// split pattern).
std::vector<RelevantWeyl> relevant_weyl_elements(int n);

} // namespace kgl
