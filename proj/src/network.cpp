#include "srgcert/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "srgcert/errors.hpp"

namespace srgcert {

namespace {

std::size_t index_of(const std::vector<int>& nodes, int id) {
    const auto it = std::find(nodes.begin(), nodes.end(), id);
    if (it == nodes.end()) throw std::invalid_argument("network: unknown node " + std::to_string(id));
    return static_cast<std::size_t>(it - nodes.begin());
}

void check_impedance(double r, double x, const std::string& what) {
    if (!std::isfinite(r) || !std::isfinite(x) || r < 0.0 || x < 0.0)
        throw std::invalid_argument(what + ": r and x must be finite and >= 0");
    if (r == 0.0 && x == 0.0) throw std::invalid_argument(what + ": r and x cannot both be zero");
}

} // namespace

void validate(const NetworkSpec& spec) {
    if (spec.nodes.empty()) throw std::invalid_argument("network: no nodes");
    if (!(spec.omega0 > 0.0)) throw std::invalid_argument("network: omega0 must be > 0");
    std::set<int> ids(spec.nodes.begin(), spec.nodes.end());
    if (ids.size() != spec.nodes.size()) throw std::invalid_argument("network: duplicate node id");
    for (const auto& l : spec.lines) {
        if (l.from == l.to) throw std::invalid_argument("network: line with from == to");
        index_of(spec.nodes, l.from);
        index_of(spec.nodes, l.to);
        check_impedance(l.r, l.x, "line " + std::to_string(l.from) + "-" + std::to_string(l.to));
    }
    for (const auto& s : spec.shunts) {
        index_of(spec.nodes, s.node);
        check_impedance(s.r, s.x, "shunt at " + std::to_string(s.node));
    }
    if (spec.converter_nodes.empty()) throw std::invalid_argument("network: no converter nodes");
    std::set<int> conv;
    for (int n : spec.converter_nodes) {
        index_of(spec.nodes, n);
        if (!conv.insert(n).second) throw std::invalid_argument("network: converter node listed twice");
    }
    for (int g : spec.grounded) {
        index_of(spec.nodes, g);
        if (conv.count(g)) throw std::invalid_argument("network: converter node is grounded");
    }

    // Connectivity over all nodes, grounded ones included.
    std::vector<std::size_t> parent(spec.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (const auto& l : spec.lines) parent[find(index_of(spec.nodes, l.from))] = find(index_of(spec.nodes, l.to));
    const std::size_t root = find(0);
    for (std::size_t i = 1; i < spec.nodes.size(); ++i)
        if (find(i) != root) throw std::invalid_argument("network: graph is disconnected");
}

CMatrix line_block(double r, double x, double omega0, double omega) {
    CMatrix z(2, 2);
    const cplx diag(r, x * omega / omega0);
    z << diag, -x, x, diag;
    return checked_inverse(z, omega, "line impedance");
}

CMatrix assemble(const NetworkSpec& spec, double omega) {
    const auto n = static_cast<Eigen::Index>(spec.nodes.size());
    CMatrix y = CMatrix::Zero(2 * n, 2 * n);
    for (const auto& l : spec.lines) {
        const auto i = static_cast<Eigen::Index>(index_of(spec.nodes, l.from));
        const auto j = static_cast<Eigen::Index>(index_of(spec.nodes, l.to));
        const CMatrix b = line_block(l, spec.omega0, omega);
        y.block(2 * i, 2 * i, 2, 2) += b;
        y.block(2 * j, 2 * j, 2, 2) += b;
        y.block(2 * i, 2 * j, 2, 2) -= b;
        y.block(2 * j, 2 * i, 2, 2) -= b;
    }
    for (const auto& s : spec.shunts) {
        const auto i = static_cast<Eigen::Index>(index_of(spec.nodes, s.node));
        y.block(2 * i, 2 * i, 2, 2) += line_block(s.r, s.x, spec.omega0, omega);
    }
    return y;
}

CMatrix kron_reduce(const CMatrix& y_full, const std::vector<std::size_t>& keep, double omega) {
    if (y_full.rows() != y_full.cols() || y_full.rows() % 2 != 0)
        throw std::invalid_argument("kron_reduce: expected a square matrix of 2x2 blocks");
    const std::size_t nb = static_cast<std::size_t>(y_full.rows() / 2);
    std::vector<bool> kept(nb, false);
    for (std::size_t k : keep) {
        if (k >= nb) throw std::invalid_argument("kron_reduce: keep index out of range");
        if (kept[k]) throw std::invalid_argument("kron_reduce: duplicate keep index");
        kept[k] = true;
    }
    std::vector<Eigen::Index> ki;
    std::vector<Eigen::Index> ei;
    for (std::size_t k : keep) {
        ki.push_back(static_cast<Eigen::Index>(2 * k));
        ki.push_back(static_cast<Eigen::Index>(2 * k + 1));
    }
    for (std::size_t b = 0; b < nb; ++b)
        if (!kept[b]) {
            ei.push_back(static_cast<Eigen::Index>(2 * b));
            ei.push_back(static_cast<Eigen::Index>(2 * b + 1));
        }
    const CMatrix ykk = y_full(ki, ki);
    if (ei.empty()) return ykk;
    const CMatrix yke = y_full(ki, ei);
    const CMatrix yek = y_full(ei, ki);
    const CMatrix yee = y_full(ei, ei);
    Eigen::PartialPivLU<CMatrix> lu(yee);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("kron_reduce: singular interior block", omega);
    return ykk - yke * lu.solve(yek);
}

GridAdmittanceEvaluator::GridAdmittanceEvaluator(NetworkSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    for (std::size_t i = 0; i < spec_.nodes.size(); ++i)
        if (std::find(spec_.grounded.begin(), spec_.grounded.end(), spec_.nodes[i]) == spec_.grounded.end())
            live_.push_back(i);
    for (int n : spec_.converter_nodes) {
        const std::size_t full = index_of(spec_.nodes, n);
        keep_.push_back(static_cast<std::size_t>(std::find(live_.begin(), live_.end(), full) - live_.begin()));
    }
}

CMatrix GridAdmittanceEvaluator::operator()(double omega) const {
    const CMatrix full = assemble(spec_, omega);
    std::vector<Eigen::Index> idx;
    for (std::size_t i : live_) {
        idx.push_back(static_cast<Eigen::Index>(2 * i));
        idx.push_back(static_cast<Eigen::Index>(2 * i + 1));
    }
    // Grounded nodes have zero voltage: drop their rows and columns.
    return kron_reduce(full(idx, idx), keep_, omega);
}

std::size_t GridAdmittanceEvaluator::block_of(int node) const { return index_of(spec_.converter_nodes, node); }

} // namespace srgcert
