#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "logtree/model.hpp"
#include "logtree/rng.hpp"
#include "logtree/series.hpp"

namespace logtree::gen {

struct GenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr long kIncreasingCap = 2000;  // exact-weight sampler cap

// ---------------------------------------------------------------------------
// Sequential-attachment families
// ---------------------------------------------------------------------------

inline void recursive_depths(long n, RngStream& rng, std::vector<std::int32_t>& out) {
    out.resize(n);
    out[0] = 0;
    for (long i = 1; i < n; ++i)
        out[i] = out[static_cast<long>(rng.next_below(i))] + 1;
}

// Gap model: a node of outdegree c owns c+1 insertion slots, all slots
// equally likely. After i nodes there are 2i-1 slots (checked as we go).
inline void port_depths(long n, RngStream& rng, std::vector<std::int32_t>& out,
                        std::vector<std::int32_t>& gaps) {
    out.resize(n);
    out[0] = 0;
    gaps.clear();
    gaps.reserve(2 * n);
    gaps.push_back(0);
    for (long i = 1; i < n; ++i) {
        const auto g = rng.next_below(gaps.size());
        const std::int32_t owner = gaps[g];
        out[i] = out[owner] + 1;
        gaps.push_back(owner);
        gaps.push_back(static_cast<std::int32_t>(i));
        if (gaps.size() != 2 * static_cast<size_t>(i + 1) - 1)
            throw GenError("port gap invariant violated");
    }
}

// ---------------------------------------------------------------------------
// Point quad trees: i.i.d. uniform points in [0,1]^d; coordinate ties go to
// the lower cell (probability-zero branch, untested by design).
// ---------------------------------------------------------------------------

class QuadArena {
public:
    explicit QuadArena(int d) : d_(d), fan_(1 << d) {}

    void reset(long expected_nodes) {
        coords_.clear();
        child_.clear();
        depth_.clear();
        coords_.reserve(expected_nodes * d_);
        child_.reserve(expected_nodes * fan_);
        depth_.reserve(expected_nodes);
    }

    /// Inserts a point (drawing d coordinates) and returns its node depth.
    std::int32_t insert(RngStream& rng) {
        double pt[16];
        for (int j = 0; j < d_; ++j) pt[j] = rng.next_double();
        if (depth_.empty()) {
            push_node(pt, 0);
            return 0;
        }
        std::int32_t v = 0;
        for (;;) {
            int cell = 0;
            for (int j = 0; j < d_; ++j)
                cell |= (pt[j] > coords_[static_cast<size_t>(v) * d_ + j]) << j;
            std::int32_t& slot = child_[static_cast<size_t>(v) * fan_ + cell];
            if (slot < 0) {
                const std::int32_t depth = depth_[v] + 1;
                slot = static_cast<std::int32_t>(depth_.size());
                push_node(pt, depth);
                return depth;
            }
            v = slot;
        }
    }

private:
    void push_node(const double* pt, std::int32_t depth) {
        coords_.insert(coords_.end(), pt, pt + d_);
        child_.insert(child_.end(), fan_, -1);
        depth_.push_back(depth);
    }

    int d_, fan_;
    std::vector<double> coords_;
    std::vector<std::int32_t> child_;
    std::vector<std::int32_t> depth_;
};

// ---------------------------------------------------------------------------
// Bucketed search trees (m-ary with oversampling; grid trees). Regions hold
// items in arrival order until they reach the split threshold, then the
// region becomes an internal node and the remaining items cascade down.
// ---------------------------------------------------------------------------

/// KeyT is double (grid points, flattened) or uint32_t ranks (mary).
template <typename KeyT>
class BucketTree {
public:
    // axes = 1 and cells = m for mary; axes = d and cells = m^d for grid.
    BucketTree(int m, int axes, long split_threshold, int pivots_per_axis)
        : m_(m), axes_(axes), threshold_(split_threshold), pivots_(pivots_per_axis) {
        cells_ = 1;
        for (int i = 0; i < axes_; ++i) cells_ *= m_;
    }

    void reset() {
        nodes_.clear();
        profile_.clear();
        items_ = 0;
    }

    long node_count() const {
        long c = 0;
        for (auto x : profile_) c += static_cast<long>(x);
        return c;
    }
    const std::vector<std::uint64_t>& profile() const { return profile_; }

    /// Insert one item; key is a span of `axes` values.
    void insert(const KeyT* key) {
        ++items_;
        if (nodes_.empty()) {
            make_bucket(0);
            nodes_[0].items.insert(nodes_[0].items.end(), key, key + axes_);
            maybe_split(0);
            return;
        }
        std::int32_t v = 0;
        while (nodes_[v].internal) v = descend(v, key);
        nodes_[v].items.insert(nodes_[v].items.end(), key, key + axes_);
        maybe_split(v);
    }

private:
    struct Node {
        bool internal = false;
        std::int32_t depth = 0;
        std::vector<KeyT> items;      // bucket: arrival-ordered keys (axes per item)
        std::vector<KeyT> splitters;  // internal: sorted, pivots_ per axis
        std::vector<std::int32_t> child;
    };

    std::int32_t descend(std::int32_t v, const KeyT* key) {
        const Node& node = nodes_[v];
        int cell = 0;
        for (int ax = 0; ax < axes_; ++ax) {
            const KeyT* s = node.splitters.data() + static_cast<size_t>(ax) * pivots_;
            int c = 0;
            while (c < pivots_ && s[c] < key[ax]) ++c;  // ties toward the lower cell
            cell = cell * m_ + c;
        }
        std::int32_t& slot = nodes_[v].child[cell];
        if (slot < 0) {
            slot = make_bucket(node.depth + 1);
        }
        return slot;
    }

    std::int32_t make_bucket(std::int32_t depth) {
        Node node;
        node.depth = depth;
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(std::move(node));
        if (static_cast<size_t>(depth) >= profile_.size()) profile_.resize(depth + 1, 0);
        profile_[depth]++;
        return id;
    }

    void maybe_split(std::int32_t v) {
        // A split hands at most threshold-1 items to any child, so no cascade.
        if (!nodes_[v].internal && static_cast<long>(nodes_[v].items.size()) / axes_ >= threshold_)
            split(v);
    }

    void split(std::int32_t v) {
        std::vector<KeyT> items = std::move(nodes_[v].items);
        nodes_[v].items.clear();
        nodes_[v].internal = true;
        nodes_[v].child.assign(cells_, -1);
        const long count = static_cast<long>(items.size()) / axes_;
        // Splitters: mary sorts the whole sample and takes order statistics;
        // grid uses the first m-1 arrivals per axis.
        auto& splitters = nodes_[v].splitters;
        splitters.assign(static_cast<size_t>(axes_) * pivots_, KeyT{});
        std::vector<bool> is_pivot_item(count, false);
        if (axes_ == 1) {
            std::vector<KeyT> sample(count);
            for (long i = 0; i < count; ++i) sample[i] = items[i];
            std::sort(sample.begin(), sample.end());
            const int tplus = static_cast<int>((threshold_ + 1) / m_);  // t+1
            for (int j = 1; j < m_; ++j) splitters[j - 1] = sample[static_cast<size_t>(j) * tplus - 1];
            for (long i = 0; i < count; ++i)
                for (int j = 0; j < pivots_; ++j)
                    if (items[i] == splitters[j]) is_pivot_item[i] = true;
        } else {
            for (int ax = 0; ax < axes_; ++ax)
                for (int j = 0; j < pivots_; ++j)
                    splitters[static_cast<size_t>(ax) * pivots_ + j] = items[static_cast<size_t>(j) * axes_ + ax];
            for (int ax = 0; ax < axes_; ++ax) {
                KeyT* s = splitters.data() + static_cast<size_t>(ax) * pivots_;
                std::sort(s, s + pivots_);
            }
            for (long i = 0; i < pivots_; ++i) is_pivot_item[i] = true;
        }
        // Redistribute non-pivot items in arrival order.
        for (long i = 0; i < count; ++i) {
            if (is_pivot_item[i]) continue;
            const KeyT* key = items.data() + static_cast<size_t>(i) * axes_;
            std::int32_t child = descend(v, key);
            nodes_[child].items.insert(nodes_[child].items.end(), key, key + axes_);
        }
    }

    int m_, axes_;
    long threshold_;
    int pivots_;
    int cells_ = 0;
    long items_ = 0;
    std::vector<Node> nodes_;
    std::vector<std::uint64_t> profile_;
};

// ---------------------------------------------------------------------------
// Increasing varieties: exact-weight recursive size-composition sampler.
// P(root degree r, ordered sizes a_1..a_r) = phi_r prod tau^_{a_i} / (s tau^_s),
// where tau^ are the EGF coefficients of tau' = phi(tau). All weights use the
// radius-rescaled coefficients (the scale cancels in every ratio).
// ---------------------------------------------------------------------------

class IncreasingSampler {
public:
    IncreasingSampler(const TreeModel& model, long n_max) : n_max_(n_max) {
        if (n_max > kIncreasingCap)
            throw GenError("increasing sampler: n exceeds the desk-scale cap (" +
                           std::to_string(kIncreasingCap) + ")");
        const bool mobile = model.family == Family::Mobile;
        double rho = 1.0;
        if (mobile) {
            rho = series::integral_R_mobile();
            tau_ = series::solve_tree_ode_mobile<double>(n_max, rho);
            deg_cap_ = n_max - 1;
            phi_.resize(deg_cap_ + 1);
            phi_[0] = 1;
            for (long j = 1; j <= deg_cap_; ++j) phi_[j] = 1.0 / j;
        } else {
            phi_ = series::normalized_phi<double>(model, 0);
            if (static_cast<long>(phi_.size()) - 1 >= 2) rho = series::integral_R_polynomial(phi_);
            tau_ = series::solve_tree_ode<double>(phi_, n_max, rho);
            deg_cap_ = static_cast<long>(phi_.size()) - 1;
        }
        // powers[r] holds [w^s] T^r for s = r..n_max-1 (only what sampling needs).
        const long rmax = std::min<long>(deg_cap_, std::max<long>(n_max - 1, 1));
        powers_.resize(rmax + 1);
        powers_[0] = {1.0};  // T^0 = 1 at s = 0
        for (long r = 1; r <= rmax; ++r) {
            const long len = n_max - r;  // s = r .. n_max-1
            if (len <= 0) break;
            powers_[r].assign(len, 0.0);
            const auto& prev = powers_[r - 1];
            for (long s = r; s <= n_max - 1; ++s) {
                double acc = 0;
                const long amin = r - 1;
                const long amax = std::min<long>(s - 1, r - 1 + static_cast<long>(prev.size()) - 1);
                for (long a = amin; a <= amax; ++a) acc += prev[a - (r - 1)] * tau_[s - a];
                powers_[r][s - r] = acc;
            }
        }
    }

    bool size_feasible(long n) const { return n >= 1 && n <= n_max_ && tau_[n] > 0; }

    // Read-only after construction; safe to share across workers.
    void depths(long n, RngStream& rng, std::vector<std::int32_t>& out) const {
        if (!size_feasible(n))
            throw GenError("increasing sampler: no trees of size " + std::to_string(n) +
                           " in this variety");
        out.clear();
        out.reserve(n);
        sample_region(n, 0, rng, out);
    }

private:
    double pw(long r, long s) const {
        if (r == 0) return s == 0 ? 1.0 : 0.0;
        if (r >= static_cast<long>(powers_.size())) return 0.0;
        const auto& row = powers_[r];
        const long idx = s - r;
        if (idx < 0 || idx >= static_cast<long>(row.size())) return 0.0;
        return row[idx];
    }

    void sample_region(long s, std::int32_t depth, RngStream& rng,
                       std::vector<std::int32_t>& out) const {
        out.push_back(depth);
        if (s == 1) return;
        // Root degree: weight phi_r [w^{s-1}] T^r.
        const long rmax = std::min<long>(deg_cap_, s - 1);
        double total = 0;
        for (long r = 1; r <= rmax; ++r)
            if (phi_[r] > 0) total += phi_[r] * pw(r, s - 1);
        const double u = rng.next_double() * total;
        double acc = 0;
        long deg = rmax;
        for (long r = 1; r <= rmax; ++r) {
            if (phi_[r] <= 0) continue;
            acc += phi_[r] * pw(r, s - 1);
            if (u < acc) {
                deg = r;
                break;
            }
        }
        // Ordered subtree sizes, slot by slot: P(a) ~ tau_a [w^{rem-a}] T^{slots-1}.
        long rem = s - 1;
        for (long slots = deg; slots >= 1; --slots) {
            long a_pick = rem - (slots - 1);
            if (slots > 1) {
                double tot = 0;
                for (long a = 1; a <= rem - (slots - 1); ++a)
                    if (tau_[a] > 0) tot += tau_[a] * pw(slots - 1, rem - a);
                const double u2 = rng.next_double() * tot;
                double acc2 = 0;
                for (long a = 1; a <= rem - (slots - 1); ++a) {
                    if (tau_[a] <= 0) continue;
                    acc2 += tau_[a] * pw(slots - 1, rem - a);
                    if (u2 < acc2) {
                        a_pick = a;
                        break;
                    }
                }
            }
            sample_region(a_pick, depth + 1, rng, out);
            rem -= a_pick;
        }
    }

    long n_max_;
    long deg_cap_ = 0;
    std::vector<double> phi_;
    std::vector<double> tau_;
    std::vector<std::vector<double>> powers_;
};

// ---------------------------------------------------------------------------
// Unified generator with reusable buffers (one per worker thread).
// ---------------------------------------------------------------------------

inline Profile profile_from_depths(const std::vector<std::int32_t>& depths, long items) {
    Profile p;
    p.n = items;
    for (auto d : depths) {
        if (static_cast<size_t>(d) >= p.counts.size()) p.counts.resize(d + 1, 0);
        p.counts[d]++;
    }
    return p;
}

class Generator {
public:
    explicit Generator(const TreeModel& model, long increasing_cap = kIncreasingCap)
        : model_(model), increasing_cap_(increasing_cap) {}

    /// Node depths of one tree drawn from the family (deterministic in rng).
    void depths(long n, RngStream& rng, std::vector<std::int32_t>& out) {
        if (n < 1) throw GenError("generate_depths: n >= 1 required");
        switch (model_.family) {
            case Family::Recursive:
                recursive_depths(n, rng, out);
                return;
            case Family::Port:
                port_depths(n, rng, out, gaps_);
                return;
            case Family::Quad: {
                if (!quad_) quad_.emplace(model_.d);
                quad_->reset(n);
                out.resize(n);
                for (long i = 0; i < n; ++i) out[i] = quad_->insert(rng);
                return;
            }
            case Family::Mary: {
                mary_tree().reset();
                ranks_.resize(n);
                fisher_yates(n, rng);
                for (long i = 0; i < n; ++i) mary_->insert(&ranks_[i]);
                profile_to_depths(mary_->profile(), out);
                return;
            }
            case Family::Grid: {
                grid_tree().reset();
                for (long i = 0; i < n; ++i) {
                    double pt[16];
                    for (int j = 0; j < model_.d; ++j) pt[j] = rng.next_double();
                    grid_->insert(pt);
                }
                profile_to_depths(grid_->profile(), out);
                return;
            }
            case Family::Increasing:
            case Family::Mobile: {
                if (n > increasing_cap_)
                    throw GenError("generate_depths: increasing varieties capped at n = " +
                                   std::to_string(increasing_cap_));
                if (!inc_ || inc_built_for_ < n) {
                    inc_.emplace(model_, std::max(n, increasing_cap_));
                    inc_built_for_ = std::max(n, increasing_cap_);
                }
                inc_->depths(n, rng, out);
                return;
            }
        }
    }

    Profile profile(long n, RngStream& rng) {
        depths(n, rng, scratch_);
        return profile_from_depths(scratch_, n);
    }

    /// Item counts of the root's child regions (split diagnostic; quad, grid
    /// and mary only).
    std::vector<long> first_split_sizes(long n, RngStream& rng) {
        switch (model_.family) {
            case Family::Quad: {
                const int d = model_.d;
                std::vector<long> cells(1L << d, 0);
                std::vector<double> root(d);
                for (int j = 0; j < d; ++j) root[j] = rng.next_double();
                for (long i = 1; i < n; ++i) {
                    int cell = 0;
                    for (int j = 0; j < d; ++j) cell |= (rng.next_double() > root[j]) << j;
                    cells[cell]++;
                }
                return cells;
            }
            case Family::Mary: {
                const long theta = bucket_split_threshold();
                if (n < theta) throw GenError("first_split_sizes: root does not split");
                ranks_.resize(n);
                fisher_yates(n, rng);
                std::vector<std::uint32_t> sample(ranks_.begin(), ranks_.begin() + theta);
                std::sort(sample.begin(), sample.end());
                std::vector<std::uint32_t> pivots;
                for (int j = 1; j < model_.m; ++j)
                    pivots.push_back(sample[static_cast<size_t>(j) * (model_.t + 1) - 1]);
                std::vector<long> cells(model_.m, 0);
                for (long i = 0; i < n; ++i) {
                    const auto x = ranks_[i];
                    if (std::find(pivots.begin(), pivots.end(), x) != pivots.end()) continue;
                    int g = 0;
                    while (g < model_.m - 1 && x > pivots[g]) ++g;
                    cells[g]++;
                }
                return cells;
            }
            case Family::Grid: {
                const int d = model_.d, m = model_.m;
                if (n < m - 1) throw GenError("first_split_sizes: root does not split");
                std::vector<double> firsts(static_cast<size_t>(m - 1) * d);
                for (auto& x : firsts) x = rng.next_double();
                std::vector<double> splitters(static_cast<size_t>(d) * (m - 1));
                for (int ax = 0; ax < d; ++ax) {
                    for (int j = 0; j < m - 1; ++j)
                        splitters[static_cast<size_t>(ax) * (m - 1) + j] =
                            firsts[static_cast<size_t>(j) * d + ax];
                    double* s = splitters.data() + static_cast<size_t>(ax) * (m - 1);
                    std::sort(s, s + (m - 1));
                }
                long cells_total = 1;
                for (int i = 0; i < d; ++i) cells_total *= m;
                std::vector<long> cells(cells_total, 0);
                for (long i = m - 1; i < n; ++i) {
                    int cell = 0;
                    for (int ax = 0; ax < d; ++ax) {
                        const double x = rng.next_double();
                        const double* s = splitters.data() + static_cast<size_t>(ax) * (m - 1);
                        int c = 0;
                        while (c < m - 1 && s[c] < x) ++c;
                        cell = cell * m + c;
                    }
                    cells[cell]++;
                }
                return cells;
            }
            default:
                throw GenError("first_split_sizes: splitting families only");
        }
    }

private:
    long bucket_split_threshold() const {
        return static_cast<long>(model_.m) * (model_.t + 1) - 1;
    }

    BucketTree<std::uint32_t>& mary_tree() {
        if (!mary_)
            mary_.emplace(model_.m, 1, bucket_split_threshold(), model_.m - 1);
        return *mary_;
    }
    BucketTree<double>& grid_tree() {
        if (!grid_)
            grid_.emplace(model_.m, model_.d, static_cast<long>(model_.m) - 1, model_.m - 1);
        return *grid_;
    }

    void fisher_yates(long n, RngStream& rng) {
        std::iota(ranks_.begin(), ranks_.end(), 0u);
        for (long i = n - 1; i >= 1; --i)
            std::swap(ranks_[i], ranks_[rng.next_below(i + 1)]);
    }

    static void profile_to_depths(const std::vector<std::uint64_t>& profile,
                                  std::vector<std::int32_t>& out) {
        out.clear();
        for (size_t k = 0; k < profile.size(); ++k)
            out.insert(out.end(), profile[k], static_cast<std::int32_t>(k));
    }

    TreeModel model_;
    long increasing_cap_;
    std::vector<std::int32_t> gaps_;
    std::vector<std::uint32_t> ranks_;
    std::vector<std::int32_t> scratch_;
    std::optional<QuadArena> quad_;
    std::optional<BucketTree<std::uint32_t>> mary_;
    std::optional<BucketTree<double>> grid_;
    std::optional<IncreasingSampler> inc_;
    long inc_built_for_ = 0;
};

// ---------------------------------------------------------------------------
// Incremental growth along a checkpoint schedule
// ---------------------------------------------------------------------------

/// Default rule n_l = floor(e^sqrt(l)), deduplicated and strictly increasing.
inline std::vector<long> default_schedule(int ell_max) {
    std::vector<long> out;
    for (int l = 1; l <= ell_max; ++l) {
        const auto n = static_cast<long>(std::floor(std::exp(std::sqrt(static_cast<double>(l)))));
        if (out.empty() || n > out.back()) out.push_back(std::max<long>(n, 1));
    }
    return out;
}

struct CheckpointRecord {
    long n;
    std::vector<std::uint64_t> counts;  // profile snapshot
};

/// Grows ONE tree through the checkpoints, snapshotting the profile.
/// Only sequential/insertion families support this.
inline std::vector<CheckpointRecord> grow_checkpoints(const TreeModel& model,
                                                      const std::vector<long>& checkpoints,
                                                      std::uint64_t seed) {
    if (!supports_incremental_growth(model))
        throw GenError("grow_checkpoints: model does not grow by single insertions");
    if (checkpoints.empty()) throw GenError("grow_checkpoints: empty schedule");
    for (size_t i = 0; i + 1 < checkpoints.size(); ++i)
        if (checkpoints[i] >= checkpoints[i + 1])
            throw GenError("grow_checkpoints: schedule must be strictly increasing");

    RngStream rng(seed, 0);
    std::vector<CheckpointRecord> out;
    const long n_final = checkpoints.back();
    size_t next_cp = 0;
    auto snapshot = [&](long n, const std::vector<std::uint64_t>& counts) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == n) {
            out.push_back({n, counts});
            ++next_cp;
        }
    };

    switch (model.family) {
        case Family::Recursive:
        case Family::Port: {
            std::vector<std::int32_t> depths;
            depths.reserve(n_final);
            std::vector<std::int32_t> gaps;
            gaps.reserve(2 * n_final);
            std::vector<std::uint64_t> counts{1};
            depths.push_back(0);
            gaps.push_back(0);
            snapshot(1, counts);
            for (long i = 1; i < n_final; ++i) {
                std::int32_t parent;
                if (model.family == Family::Recursive) {
                    parent = static_cast<std::int32_t>(rng.next_below(i));
                } else {
                    const auto g = rng.next_below(gaps.size());
                    parent = gaps[g];
                    gaps.push_back(parent);
                    gaps.push_back(static_cast<std::int32_t>(i));
                }
                const std::int32_t d = depths[parent] + 1;
                depths.push_back(d);
                if (static_cast<size_t>(d) >= counts.size()) counts.resize(d + 1, 0);
                counts[d]++;
                snapshot(i + 1, counts);
            }
            return out;
        }
        case Family::Quad: {
            QuadArena arena(model.d);
            arena.reset(n_final);
            std::vector<std::uint64_t> counts;
            for (long i = 0; i < n_final; ++i) {
                const auto d = arena.insert(rng);
                if (static_cast<size_t>(d) >= counts.size()) counts.resize(d + 1, 0);
                counts[d]++;
                snapshot(i + 1, counts);
            }
            return out;
        }
        case Family::Mary: {
            // Items arrive online, so keys are i.i.d. uniforms; their ranks
            // form a uniform permutation almost surely.
            BucketTree<double> tree(model.m, 1, static_cast<long>(model.m) * (model.t + 1) - 1,
                                    model.m - 1);
            for (long i = 0; i < n_final; ++i) {
                const double x = rng.next_double();
                tree.insert(&x);
                snapshot(i + 1, tree.profile());
            }
            return out;
        }
        case Family::Grid: {
            BucketTree<double> tree(model.m, model.d, static_cast<long>(model.m) - 1,
                                    model.m - 1);
            for (long i = 0; i < n_final; ++i) {
                double pt[16];
                for (int j = 0; j < model.d; ++j) pt[j] = rng.next_double();
                tree.insert(pt);
                snapshot(i + 1, tree.profile());
            }
            return out;
        }
        default:
            throw GenError("grow_checkpoints: unreachable");
    }
}

}  // namespace logtree::gen
