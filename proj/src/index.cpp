#include "dcs/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcs/error.hpp"

namespace dcs {

namespace {

thread_local std::vector<Value> scratch_key;

const std::vector<Value>& make_key(const std::vector<int>& attrs, const std::vector<Value>& w) {
    scratch_key.resize(attrs.size());
    for (std::size_t j = 0; j < attrs.size(); ++j) scratch_key[j] = w[attrs[j]];
    return scratch_key;
}

FragmentIndex::Level build_level(const Relation& rel, const std::vector<int>& key_attrs,
                                 const std::vector<int>& y_attrs, AttrSet X) {
    FragmentIndex::Level level;
    level.key_attributes = key_attrs;
    std::vector<int> kc, yc;
    for (int a : key_attrs) kc.push_back(rel.column_of(a));
    for (int a : y_attrs) yc.push_back(rel.column_of(a));
    std::vector<int> x_in_y;  // positions inside a projected row that belong to X
    for (std::size_t j = 0; j < y_attrs.size(); ++j)
        if (X & bit(y_attrs[j])) x_in_y.push_back(static_cast<int>(j));

    std::vector<std::vector<Value>> recs;
    recs.reserve(rel.size());
    for (std::size_t r = 0; r < rel.size(); ++r) {
        const Value* row = rel.row(r);
        std::vector<Value> rec;
        rec.reserve(kc.size() + yc.size());
        for (int c : kc) rec.push_back(row[c]);
        for (int c : yc) rec.push_back(row[c]);
        recs.push_back(std::move(rec));
    }
    std::sort(recs.begin(), recs.end());
    recs.erase(std::unique(recs.begin(), recs.end()), recs.end());

    const std::size_t kw = kc.size(), yw = yc.size();
    std::size_t i = 0;
    while (i < recs.size()) {
        std::size_t j = i;
        while (j < recs.size() && std::equal(recs[i].begin(), recs[i].begin() + kw, recs[j].begin())) ++j;
        Fragment f;
        f.offset = static_cast<std::uint32_t>(level.rows.size() / std::max<std::size_t>(yw, 1));
        f.count = static_cast<std::uint32_t>(j - i);
        std::vector<std::vector<Value>> xs;
        for (std::size_t t = i; t < j; ++t) {
            level.rows.insert(level.rows.end(), recs[t].begin() + kw, recs[t].end());
            std::vector<Value> x;
            for (int p : x_in_y) x.push_back(recs[t][kw + p]);
            xs.push_back(std::move(x));
        }
        // Projections are distinct, so the degree is the largest run of equal X parts.
        std::sort(xs.begin(), xs.end());
        std::uint32_t best = 0, run = 0;
        for (std::size_t t = 0; t < xs.size(); ++t) {
            run = (t > 0 && xs[t] == xs[t - 1]) ? run + 1 : 1;
            best = std::max(best, run);
        }
        f.degree = best;
        level.fragments.emplace(std::vector<Value>(recs[i].begin(), recs[i].begin() + kw), f);
        i = j;
    }
    return level;
}

}  // namespace

const Fragment* FragmentIndex::fragment(int constraint, int level, const std::vector<Value>& w) const {
    const Entry& e = entries[constraint];
    const Level& lv = e.levels[e.level_of[level]];
    auto it = lv.fragments.find(make_key(lv.key_attributes, w));
    return it == lv.fragments.end() ? nullptr : &it->second;
}

const Value* FragmentIndex::fragment_row(int constraint, int level, const Fragment& f, std::uint32_t r) const {
    const Entry& e = entries[constraint];
    const Level& lv = e.levels[e.level_of[level]];
    return lv.rows.data() + (static_cast<std::size_t>(f.offset) + r) * e.y_attributes.size();
}

int FragmentIndex::column_in_y(int constraint, int attribute) const {
    const auto& ys = entries[constraint].y_attributes;
    auto it = std::find(ys.begin(), ys.end(), attribute);
    return it == ys.end() ? -1 : static_cast<int>(it - ys.begin());
}

std::vector<std::vector<Value>> FragmentIndex::rows(int constraint, int level, const std::vector<Value>& w) const {
    std::vector<std::vector<Value>> out;
    const Fragment* f = fragment(constraint, level, w);
    if (!f) return out;
    const std::size_t yw = entries[constraint].y_attributes.size();
    for (std::uint32_t r = 0; r < f->count; ++r) {
        const Value* p = fragment_row(constraint, level, *f, r);
        out.emplace_back(p, p + yw);
    }
    return out;
}

FragmentIndex build_index(const JoinQuery& q, const ConstraintSet& dc, const std::vector<int>& order) {
    const int k = q.attribute_count();
    if (static_cast<int>(order.size()) != k) throw SchemaError("attribute order must list every attribute once");
    FragmentIndex idx;
    idx.order = order;
    idx.position.assign(k, 0);
    for (int i = 0; i < k; ++i) idx.position[order[i]] = i + 1;
    for (int a = 0; a < k; ++a)
        if (idx.position[a] == 0) throw SchemaError("attribute order must list every attribute once");

    for (std::size_t c = 0; c < dc.size(); ++c) {
        const auto& con = dc.constraints[c];
        FragmentIndex::Entry e;
        e.guard = dc.guards[c];
        if (e.guard < 0) throw UnguardedConstraint("constraint without a main guard");
        e.X = con.X;
        e.Y = con.Y;
        e.y_attributes = members(con.Y);
        const Relation& rel = q.relations[e.guard];
        const AttrSet schema = rel.schema_mask();
        AttrSet prefix = 0, last_key = ~AttrSet{0};
        for (int i = 0; i <= k; ++i) {
            if (i > 0) prefix |= bit(order[i - 1]);
            AttrSet key = schema & prefix;
            if (key != last_key) {
                e.levels.push_back(build_level(rel, members(key), e.y_attributes, con.X));
                last_key = key;
            }
            e.level_of.push_back(static_cast<int>(e.levels.size()) - 1);
        }
        idx.entries.push_back(std::move(e));
    }
    return idx;
}

Ratio reldeg(const FragmentIndex& idx, int i, int constraint, const std::vector<Value>& w) {
    const Fragment* den = idx.fragment(constraint, i - 1, w);
    if (!den) throw EmptyDenominator("prefix is inconsistent with the guard of the constraint");
    const Fragment* num = idx.fragment(constraint, i, w);
    return {num ? num->count : 0u, den->count};
}

std::pair<Ratio, int> reldeg_star_and_constraint(const FragmentIndex& idx, int i, const std::vector<int>& dc_of_attribute,
                                                 const std::vector<Value>& w) {
    if (dc_of_attribute.empty()) throw std::invalid_argument("DC(A_i) is empty");
    Ratio best{0, 1};
    int arg = -1;
    for (int c : dc_of_attribute) {
        Ratio r = reldeg(idx, i, c, w);
        // r > best, compared exactly
        if (arg < 0 || static_cast<unsigned __int128>(r.num) * best.den > static_cast<unsigned __int128>(best.num) * r.den) {
            best = r;
            arg = c;
        }
    }
    return {best, arg};
}

double b_value(const FragmentIndex& idx, int i, const std::vector<Value>& w,
               const std::vector<std::pair<int, double>>& weighted_constraints) {
    double sum = 0;
    for (const auto& [c, delta] : weighted_constraints) {
        const Fragment* f = idx.fragment(c, i, w);
        if (!f) return -std::numeric_limits<double>::infinity();
        sum += delta * std::log2(static_cast<double>(f->degree));
    }
    return sum;
}

}  // namespace dcs
