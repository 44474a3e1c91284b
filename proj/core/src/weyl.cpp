#include "kgl/weyl.hpp"

#include <numeric>
#include <sstream>

#include "kgl/errors.hpp"

namespace kgl {

WeylPerm::WeylPerm(std::vector<int> images) : img_(std::move(images)) {
    std::vector<bool> seen(img_.size(), false);
    for (int v : img_) {
        if (v < 0 || v >= n() || seen[static_cast<std::size_t>(v)])
            throw ConfigError("WeylPerm: not a bijection");
        seen[static_cast<std::size_t>(v)] = true;
    }
}

WeylPerm WeylPerm::identity(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    return WeylPerm(std::move(v));
}

WeylPerm WeylPerm::longest(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = n - 1 - j;
    return WeylPerm(std::move(v));
}

bool WeylPerm::is_longest() const {
    for (int j = 0; j < n(); ++j)
        if ((*this)(j) != n() - 1 - j) return false;
    return true;
}

WeylPerm WeylPerm::inverse() const {
    std::vector<int> v(img_.size());
    for (int j = 0; j < n(); ++j) v[static_cast<std::size_t>(img_[static_cast<std::size_t>(j)])] = j;
    return WeylPerm(std::move(v));
}

int RelevantWeyl::n() const {
    int s = 0;
    for (int k : composition) s += k;
    return s;
}

WeylPerm RelevantWeyl::permutation() const {
    std::vector<int> img(static_cast<std::size_t>(n()));
    int off = 0;
    for (int k : composition) {
        for (int j = 0; j < k; ++j)
            img[static_cast<std::size_t>(off + j)] = off + (k - 1 - j);
        off += k;
    }
    return WeylPerm(std::move(img));
}

std::string RelevantWeyl::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < composition.size(); ++i) {
        if (i) os << ",";
        os << composition[i];
    }
    os << ")";
    return os.str();
}

std::vector<RelevantWeyl> relevant_weyl_elements(int n) {
    if (n < 1) throw ConfigError("relevant_weyl_elements: n >= 1");
    std::vector<RelevantWeyl> out;
    // compositions of n <-> subsets of the n-1 gap positions
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
        RelevantWeyl w;
        int run = 1;
        for (int gap = 0; gap < n - 1; ++gap) {
            if (mask & (1u << gap)) {
                w.composition.push_back(run);
                run = 1;
            } else {
                ++run;
            }
        }
        w.composition.push_back(run);
        out.push_back(std::move(w));
    }
    return out;
}

} // namespace kgl
