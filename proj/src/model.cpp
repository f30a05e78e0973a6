#include "ctbn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctbn/error.hpp"
#include "ctbn/rng.hpp"

namespace ctbn {

StateMask pack(const Config& full_config) {
    if (full_config.size() > static_cast<std::size_t>(kMaxNodes)) {
        throw Error(ErrorKind::InvalidConfig, "configuration longer than 64 nodes");
    }
    StateMask m = 0;
    for (std::size_t i = 0; i < full_config.size(); ++i) {
        const auto b = full_config.bits[i];
        if (b > 1) throw Error(ErrorKind::InvalidConfig, "configuration entries must be 0 or 1");
        m |= static_cast<StateMask>(b) << i;
    }
    return m;
}

Config unpack(StateMask state, int d) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(get_bit(state, i));
    return Config::full(std::move(bits));
}

std::vector<std::uint8_t> dummy_encode(NodeId w, const Config& c, int d) {
    if (w < 0 || w >= d) throw Error(ErrorKind::InvalidConfig, "node index out of range");
    if (c.size() != static_cast<std::size_t>(d - 1)) {
        throw Error(ErrorKind::InvalidConfig,
                    "restricted configuration must have length d-1 = " + std::to_string(d - 1));
    }
    if (c.excluded && *c.excluded != w) {
        throw Error(ErrorKind::InvalidConfig, "restricted configuration excludes a different node");
    }
    std::vector<std::uint8_t> z;
    z.reserve(static_cast<std::size_t>(d));
    z.push_back(1);
    for (auto b : c.bits) {
        if (b > 1) throw Error(ErrorKind::InvalidConfig, "configuration entries must be 0 or 1");
        z.push_back(b);
    }
    return z;
}

// ---------------------------------------------------------------------------

BetaMatrix::BetaMatrix(int d) : d_(d), rows_(2 * static_cast<std::size_t>(d)) {
    if (d < 2) throw Error(ErrorKind::InvalidParameter, "beta matrix needs d >= 2");
    for (auto& r : rows_) r.coef.assign(static_cast<std::size_t>(d - 1), 0.0);
}

double BetaMatrix::at(NodeId w, Transition tr, NodeId u) const {
    if (u == w || u < 0 || u >= d_) throw Error(ErrorKind::InvalidParameter, "coefficient index must satisfy u != w");
    return row(w, tr).coef[static_cast<std::size_t>(position_in_rest(u, w))];
}

void BetaMatrix::set(NodeId w, Transition tr, NodeId u, double value) {
    if (u == w || u < 0 || u >= d_) throw Error(ErrorKind::InvalidParameter, "coefficient index must satisfy u != w");
    row(w, tr).coef[static_cast<std::size_t>(position_in_rest(u, w))] = value;
}

double BetaMatrix::log_rate(NodeId w, Transition tr, RestrictedMask c) const {
    const Row& r = row(w, tr);
    double eta = r.intercept;
    for (std::size_t k = 0; k < r.coef.size(); ++k) {
        if ((c >> k) & 1U) eta += r.coef[k];
    }
    return eta;
}

bool BetaMatrix::all_finite() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const Row& r) {
        return std::isfinite(r.intercept) &&
               std::all_of(r.coef.begin(), r.coef.end(), [](double v) { return std::isfinite(v); });
    });
}

EdgeSet edges_from_beta(const BetaMatrix& beta) {
    EdgeSet out;
    for (NodeId w = 0; w < beta.d(); ++w) {
        for (NodeId u = 0; u < beta.d(); ++u) {
            if (u == w) continue;
            if (beta.at(w, Transition::Up, u) != 0.0 || beta.at(w, Transition::Down, u) != 0.0) {
                out.emplace(u, w);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

CtbnModel::CtbnModel(int d, std::vector<std::vector<NodeId>> parents, std::vector<NodeCim> cims,
                     std::optional<BetaMatrix> beta, std::optional<std::uint64_t> seed)
    : d_(d), parents_(std::move(parents)), cims_(std::move(cims)), beta_(std::move(beta)), seed_(seed) {
    if (d_ < 1 || d_ > kMaxNodes) throw Error(ErrorKind::InvalidParameter, "node count must be in [1, 64]");
    if (parents_.size() != static_cast<std::size_t>(d_) || cims_.size() != static_cast<std::size_t>(d_)) {
        throw Error(ErrorKind::InvalidInput, "parents and cims must have one entry per node");
    }
    for (NodeId w = 0; w < d_; ++w) {
        const auto& pa = parents_[static_cast<std::size_t>(w)];
        for (std::size_t i = 0; i < pa.size(); ++i) {
            if (pa[i] < 0 || pa[i] >= d_) throw Error(ErrorKind::InvalidInput, "parent index out of range");
            if (pa[i] == w) throw Error(ErrorKind::InvalidInput, "node cannot be its own parent");
            if (i > 0 && pa[i] <= pa[i - 1]) {
                throw Error(ErrorKind::InvalidInput, "parent lists must be sorted and duplicate-free");
            }
        }
        if (pa.size() > 20) throw Error(ErrorKind::Capacity, "more than 20 parents per node");
        const auto& table = cims_[static_cast<std::size_t>(w)].rates;
        if (table.size() != (std::size_t{1} << pa.size())) {
            throw Error(ErrorKind::InvalidInput, "cim table must cover every parent configuration");
        }
        for (const auto& q : table) {
            for (double r : q) {
                if (!(r > 0.0) || !std::isfinite(r)) {
                    throw Error(ErrorKind::InvalidInput, "intensities must be positive and finite");
                }
            }
        }
    }
    if (beta_) {
        if (beta_->d() != d_) throw Error(ErrorKind::InvalidInput, "beta dimension does not match model");
        if (!beta_->all_finite()) throw Error(ErrorKind::InvalidInput, "beta entries must be finite");
        for (NodeId w = 0; w < d_; ++w) {
            const auto& pa = parents_[static_cast<std::size_t>(w)];
            for (int s = 0; s < 2; ++s) {
                const Transition tr = leaving(s);
                for (NodeId u = 0; u < d_; ++u) {
                    if (u == w || std::binary_search(pa.begin(), pa.end(), u)) continue;
                    if (beta_->at(w, tr, u) != 0.0) {
                        throw Error(ErrorKind::InvalidInput, "beta has a nonzero coefficient on a non-parent");
                    }
                }
                for (std::size_t idx = 0; idx < cims_[static_cast<std::size_t>(w)].rates.size(); ++idx) {
                    RestrictedMask c = 0;
                    for (std::size_t i = 0; i < pa.size(); ++i) {
                        const auto bit = (idx >> (pa.size() - 1 - i)) & 1U;
                        c |= static_cast<RestrictedMask>(bit) << position_in_rest(pa[i], w);
                    }
                    const double q = cims_[static_cast<std::size_t>(w)].rates[idx][static_cast<std::size_t>(s)];
                    const double q_beta = std::exp(beta_->log_rate(w, tr, c));
                    if (std::abs(q_beta - q) > 1e-12 * q) {
                        throw Error(ErrorKind::InvalidInput, "beta does not reproduce the intensity table");
                    }
                }
            }
        }
    }
}

std::size_t CtbnModel::parent_index(NodeId w, StateMask state) const {
    const auto& pa = parents_[static_cast<std::size_t>(w)];
    std::size_t idx = 0;
    for (NodeId u : pa) idx = (idx << 1) | static_cast<std::size_t>(get_bit(state, u));
    return idx;
}

double CtbnModel::rate(StateMask state, NodeId w) const {
    return cims_[static_cast<std::size_t>(w)].rates[parent_index(w, state)][static_cast<std::size_t>(get_bit(state, w))];
}

double CtbnModel::rate(const Config& s, NodeId w) const {
    if (s.size() != static_cast<std::size_t>(d_) || s.excluded) {
        throw Error(ErrorKind::InvalidConfig, "rate needs a full configuration of length d");
    }
    if (w < 0 || w >= d_) throw Error(ErrorKind::InvalidConfig, "node index out of range");
    return rate(pack(s), w);
}

double CtbnModel::rate_restricted(NodeId w, Transition tr, RestrictedMask c) const {
    return rate(expand(c, w, source_state(tr)), w);
}

EdgeSet CtbnModel::edges() const {
    EdgeSet out;
    for (NodeId w = 0; w < d_; ++w) {
        for (NodeId u : parents_[static_cast<std::size_t>(w)]) out.emplace(u, w);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr double kSlowRate = 1.0;
constexpr double kFastRate = 9.0;
constexpr double kFreeRate = 5.0;
} // namespace

CtbnModel make_m1(int d, std::uint64_t seed) {
    if (d < 2 || d > kMaxNodes) throw Error(ErrorKind::InvalidParameter, "M1 needs 2 <= d <= 64");
    SplitMix64 rng(seed);
    std::vector<std::vector<NodeId>> parents(static_cast<std::size_t>(d));
    std::vector<NodeCim> cims(static_cast<std::size_t>(d));
    BetaMatrix beta(d);

    cims[0].rates = {{kFreeRate, kFreeRate}};
    beta.row(0, Transition::Up).intercept = std::log(kFreeRate);
    beta.row(0, Transition::Down).intercept = std::log(kFreeRate);

    for (NodeId k = 1; k < d; ++k) {
        parents[static_cast<std::size_t>(k)] = {k - 1};
        const int a = rng.coin() ? 1 : 0;
        auto& table = cims[static_cast<std::size_t>(k)].rates;
        table.resize(2);
        for (int c = 0; c < 2; ++c) {
            for (int s = 0; s < 2; ++s) {
                table[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)] =
                    s == std::abs(c - a) ? kSlowRate : kFastRate;
            }
        }
        for (int s = 0; s < 2; ++s) {
            const Transition tr = leaving(s);
            const double at0 = std::log(table[0][static_cast<std::size_t>(s)]);
            const double at1 = std::log(table[1][static_cast<std::size_t>(s)]);
            beta.row(k, tr).intercept = at0;
            beta.set(k, tr, k - 1, at1 - at0);
        }
    }
    return CtbnModel(d, std::move(parents), std::move(cims), std::move(beta), seed);
}

CtbnModel make_m2(int d, std::uint64_t seed) {
    if (d < 5 || d > kMaxNodes) throw Error(ErrorKind::InvalidParameter, "M2 needs 5 <= d <= 64");
    SplitMix64 rng(seed);
    std::vector<std::vector<NodeId>> parents(static_cast<std::size_t>(d));
    std::vector<NodeCim> cims(static_cast<std::size_t>(d));

    for (NodeId w = 0; w < d; ++w) {
        auto& table = cims[static_cast<std::size_t>(w)].rates;
        if (w >= 5) {
            table = {{kFreeRate, kFreeRate}};
            continue;
        }
        std::vector<NodeId> pool;
        for (NodeId u = 0; u < 5; ++u) {
            if (u != w) pool.push_back(u);
        }
        // Partial Fisher-Yates: two distinct draws from the other four.
        for (std::size_t i = 0; i < 2; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<NodeId> pa{pool[0], pool[1]};
        std::sort(pa.begin(), pa.end());
        parents[static_cast<std::size_t>(w)] = pa;

        const int preferred = rng.coin() ? 1 : 0;
        table.resize(4);
        for (std::size_t idx = 0; idx < 4; ++idx) {
            const bool all_ones = idx == 3;
            for (int s = 0; s < 2; ++s) {
                const bool is_preferred = s == preferred;
                table[idx][static_cast<std::size_t>(s)] = (is_preferred == all_ones) ? kFastRate : kSlowRate;
            }
        }
    }
    return CtbnModel(d, std::move(parents), std::move(cims), std::nullopt, seed);
}

} // namespace ctbn
