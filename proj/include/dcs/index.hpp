#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dcs/model.hpp"

namespace dcs {

struct KeyHash {
    std::size_t operator()(const std::vector<Value>& key) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ key.size();
        for (Value v : key) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
        }
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

// R_Y(i, w): distinct Y-projections of the guard rows that agree with w on schema(R) ∩ V_i.
struct Fragment {
    std::uint32_t offset = 0;  // first row in the owning level's pool
    std::uint32_t count = 0;
    std::uint32_t degree = 0;  // deg_{Y|X} of the semi-joined guard
};

struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

class FragmentIndex {
public:
    struct Level {
        std::vector<int> key_attributes;  // schema(R) ∩ V_i, ascending ids
        std::unordered_map<std::vector<Value>, Fragment, KeyHash> fragments;
        std::vector<Value> rows;  // pooled projections, |Y| values each
    };
    struct Entry {
        int guard = -1;
        AttrSet X = 0, Y = 0;
        std::vector<int> y_attributes;  // ascending ids, column layout of projected rows
        std::vector<int> level_of;      // level i -> index into levels
        std::vector<Level> levels;
    };

    std::vector<int> order;     // A_1..A_k as attribute ids
    std::vector<int> position;  // attribute id -> 1-based position in order
    std::vector<Entry> entries;  // one per constraint, same indexing as the ConstraintSet

    int k() const { return static_cast<int>(order.size()); }
    // Lookup with w indexed by attribute id; only attributes of V_level are read. nullptr when absent.
    const Fragment* fragment(int constraint, int level, const std::vector<Value>& w) const;
    const Value* fragment_row(int constraint, int level, const Fragment& f, std::uint32_t r) const;
    int column_in_y(int constraint, int attribute) const;
    // Materialized rows of a fragment, mainly for tests and diagnostics.
    std::vector<std::vector<Value>> rows(int constraint, int level, const std::vector<Value>& w) const;
};

FragmentIndex build_index(const JoinQuery& q, const ConstraintSet& dc, const std::vector<int>& order);

// |R_Y(i, w + a)| / |R_Y(i-1, w)| for the level-i attribute a = w[A_i]. Throws EmptyDenominator.
Ratio reldeg(const FragmentIndex& idx, int i, int constraint, const std::vector<Value>& w);

// Largest reldeg over the given DC(A_i) (canonical order, first wins ties) and its constraint.
std::pair<Ratio, int> reldeg_star_and_constraint(const FragmentIndex& idx, int i, const std::vector<int>& dc_of_attribute,
                                                 const std::vector<Value>& w);

// log2 B_i(w) = sum delta_c log2 deg_c(R ⋉ w); -inf when some weighted fragment is absent.
double b_value(const FragmentIndex& idx, int i, const std::vector<Value>& w,
               const std::vector<std::pair<int, double>>& weighted_constraints);

}  // namespace dcs
