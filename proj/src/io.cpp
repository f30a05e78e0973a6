#include "ctbn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctbn/error.hpp"

namespace ctbn {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string bitstring(std::size_t idx, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if ((idx >> (width - 1 - i)) & 1U) s[i] = '1';
    }
    return s;
}

std::size_t parse_bitstring(const std::string& s) {
    std::size_t idx = 0;
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw Error(ErrorKind::InvalidInput, "config bitstring must contain only 0/1");
        idx = (idx << 1) | static_cast<std::size_t>(ch - '0');
    }
    return idx;
}

template <class T>
T get_field(const json& j, const char* name) {
    if (!j.contains(name)) throw Error(ErrorKind::InvalidInput, std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("bad field '") + name + "': " + e.what());
    }
}

} // namespace

json model_to_json(const CtbnModel& model) {
    json j;
    j["d"] = model.d();
    j["parents"] = model.parent_lists();
    json cims = json::object();
    for (NodeId w = 0; w < model.d(); ++w) {
        json table = json::object();
        const auto& rates = model.cim(w).rates;
        for (std::size_t idx = 0; idx < rates.size(); ++idx) {
            table[bitstring(idx, model.parents(w).size())] = {rates[idx][0], rates[idx][1]};
        }
        cims[std::to_string(w)] = std::move(table);
    }
    j["cims"] = std::move(cims);
    if (const auto& beta = model.beta()) {
        json rows = json::array();
        for (const auto& key : all_triples(model.d())) {
            const auto& r = beta->row(key.w, key.tr);
            json row = json::array({r.intercept});
            for (double v : r.coef) row.push_back(v);
            rows.push_back(std::move(row));
        }
        j["beta"] = std::move(rows);
    }
    if (model.seed()) j["seed"] = *model.seed();
    return j;
}

CtbnModel model_from_json(const json& j) {
    const int d = get_field<int>(j, "d");
    if (d < 1 || d > kMaxNodes) throw Error(ErrorKind::InvalidInput, "d must be in [1, 64]");
    auto parents = get_field<std::vector<std::vector<NodeId>>>(j, "parents");
    if (parents.size() != static_cast<std::size_t>(d)) throw Error(ErrorKind::InvalidInput, "parents must have d entries");
    const json cims_j = get_field<json>(j, "cims");
    std::vector<NodeCim> cims(static_cast<std::size_t>(d));
    for (NodeId w = 0; w < d; ++w) {
        const auto key = std::to_string(w);
        if (!cims_j.contains(key)) throw Error(ErrorKind::InvalidInput, "cims missing node " + key);
        const auto width = parents[static_cast<std::size_t>(w)].size();
        if (width > 20) throw Error(ErrorKind::Capacity, "more than 20 parents per node");
        auto& rates = cims[static_cast<std::size_t>(w)].rates;
        rates.assign(std::size_t{1} << width, {0.0, 0.0});
        std::vector<char> seen(rates.size(), 0);
        for (const auto& [bits, pair] : cims_j.at(key).items()) {
            if (bits.size() != width) throw Error(ErrorKind::InvalidInput, "bitstring width mismatch for node " + key);
            const auto idx = parse_bitstring(bits);
            if (!pair.is_array() || pair.size() != 2) throw Error(ErrorKind::InvalidInput, "rates must be [q01, q10]");
            rates[idx] = {pair[0].get<double>(), pair[1].get<double>()};
            seen[idx] = 1;
        }
        for (char s : seen) {
            if (!s) throw Error(ErrorKind::InvalidInput, "cims for node " + key + " do not cover every parent configuration");
        }
    }
    std::optional<BetaMatrix> beta;
    if (j.contains("beta") && !j.at("beta").is_null()) {
        const auto rows = get_field<std::vector<std::vector<double>>>(j, "beta");
        if (rows.size() != 2 * static_cast<std::size_t>(d)) throw Error(ErrorKind::InvalidInput, "beta must have 2d rows");
        beta.emplace(d);
        const auto keys = all_triples(d);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != static_cast<std::size_t>(d)) throw Error(ErrorKind::InvalidInput, "beta rows must have length d");
            auto& row = beta->row(keys[r].w, keys[r].tr);
            row.intercept = rows[r][0];
            row.coef.assign(rows[r].begin() + 1, rows[r].end());
        }
    }
    std::optional<std::uint64_t> seed;
    if (j.contains("seed") && !j.at("seed").is_null()) seed = get_field<std::uint64_t>(j, "seed");
    return CtbnModel(d, std::move(parents), std::move(cims), std::move(beta), seed);
}

std::string trajectory_to_json(const Trajectory& traj) {
    std::string out = "{\"d\": " + std::to_string(traj.d) + ", \"T\": " + format_double(traj.T) + ", \"initial\": [";
    for (int i = 0; i < traj.d; ++i) {
        if (i) out += ", ";
        out += std::to_string(get_bit(traj.initial, i));
    }
    out += "], \"jumps\": [";
    for (std::size_t i = 0; i < traj.jumps.size(); ++i) {
        if (i) out += ", ";
        out += "{\"t\": " + format_double(traj.jumps[i].t) + ", \"node\": " + std::to_string(traj.jumps[i].node) + "}";
    }
    out += "]}\n";
    return out;
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory traj;
    traj.d = get_field<int>(j, "d");
    traj.T = get_field<double>(j, "T");
    const auto init = get_field<std::vector<int>>(j, "initial");
    if (traj.d < 1 || traj.d > kMaxNodes || init.size() != static_cast<std::size_t>(traj.d)) {
        throw Error(ErrorKind::InvalidInput, "initial must list d binary states");
    }
    for (std::size_t i = 0; i < init.size(); ++i) {
        if (init[i] != 0 && init[i] != 1) throw Error(ErrorKind::InvalidInput, "initial entries must be 0 or 1");
        traj.initial |= static_cast<StateMask>(init[i]) << i;
    }
    const json jumps = get_field<json>(j, "jumps");
    if (!jumps.is_array()) throw Error(ErrorKind::InvalidInput, "jumps must be an array");
    for (const auto& e : jumps) {
        traj.jumps.push_back({get_field<double>(e, "t"), get_field<int>(e, "node")});
    }
    traj.validate();
    return traj;
}

json stats_to_json(const SuffStats& stats) {
    json j;
    j["d"] = stats.d;
    j["T"] = stats.T;
    json n = json::object();
    json t = json::object();
    for (NodeId w = 0; w < stats.d; ++w) {
        const auto& ns = stats.node(w);
        json nw = json::object();
        json tw = json::object();
        for (int s = 0; s < 2; ++s) {
            json counts = json::object();
            for (const auto& [c, cnt] : ns.counts[static_cast<std::size_t>(s)]) counts[std::to_string(c)] = cnt;
            nw[s == 0 ? "01" : "10"] = std::move(counts);
            json times = json::object();
            for (const auto& [c, secs] : ns.times[static_cast<std::size_t>(s)]) times[std::to_string(c)] = secs;
            tw[s == 0 ? "0" : "1"] = std::move(times);
        }
        n[std::to_string(w)] = std::move(nw);
        t[std::to_string(w)] = std::move(tw);
    }
    j["n"] = std::move(n);
    j["t"] = std::move(t);
    return j;
}

json selection_report_json(const StructureFit& fit) {
    json out = json::array();
    for (const auto& sel : fit.selections) {
        json e;
        e["w"] = sel.key.w;
        e["s"] = sel.key.s();
        e["sp"] = sel.key.sp();
        e["lambda"] = sel.lambda;
        e["delta"] = sel.delta;
        e["beta"] = std::vector<double>(sel.beta_post.data(), sel.beta_post.data() + sel.beta_post.size());
        e["beta_pre"] = std::vector<double>(sel.beta_pre.data(), sel.beta_pre.data() + sel.beta_pre.size());
        e["bic"] = sel.bic;
        e["gic"] = sel.gic;
        e["degenerate"] = sel.degenerate;
        out.push_back(std::move(e));
    }
    return out;
}

json theory_report_json(const TheoremBounds& b) {
    json j;
    j["A_beta"] = b.cif.A_beta;
    j["F_lower"] = b.cif.F_lower;
    j["beta_min"] = b.cif.beta_min;
    j["S_size"] = b.cif.S_size;
    j["max_Sw"] = b.cif.max_Sw;
    j["xi"] = b.xi;
    j["epsilon"] = b.epsilon;
    j["K"] = b.K;
    j["T"] = b.T;
    j["T_min"] = b.T_min;
    j["lambda_lo"] = b.lambda_lo;
    j["lambda_hi"] = b.lambda_hi;
    j["R"] = b.R;
    j["zeta"] = b.zeta;
    j["rho1"] = b.rho1;
    j["Delta"] = b.delta;
    j["nu_norm"] = b.nu_norm;
    j["vacuous"] = b.vacuous;
    return j;
}

std::string path_csv(const LambdaPath& path) {
    std::string out = "lambda,objective,nnz,kkt_gap\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out += format_double(path.lambdas[i]) + "," + format_double(path.objectives[i]) + "," +
               std::to_string(path.nnz(i)) + "," + format_double(path.kkt_gaps[i]) + "\n";
    }
    return out;
}

std::string edge_list(const EdgeSet& edges) {
    std::string out;
    for (const auto& [u, w] : edges) out += std::to_string(u) + " " + std::to_string(w) + "\n";
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

} // namespace ctbn
