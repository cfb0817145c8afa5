#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "srgcert/lincore.hpp"
#include "srgcert/models.hpp"

namespace srgcert {

/// RL branch; x is the reactance at omega0.
struct LineSpec {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
};

/// Constant-impedance RL shunt from a node to ground.
struct ShuntSpec {
    int node = 0;
    double r = 0.0;
    double x = 0.0;
};

struct NetworkSpec {
    std::vector<int> nodes;
    std::vector<LineSpec> lines;
    std::vector<ShuntSpec> shunts;
    std::vector<int> converter_nodes; ///< kept by the reduction, in this order
    std::vector<int> grounded;        ///< infinite buses, held at zero small-signal voltage
    double omega0 = kNominalOmega;
};

void validate(const NetworkSpec& spec);

/// Inverse of R I + X (j omega/omega0) I + X Jrot, Jrot = [[0, -1], [1, 0]].
CMatrix line_block(double r, double x, double omega0, double omega);
inline CMatrix line_block(const LineSpec& l, double omega0, double omega) {
    return line_block(l.r, l.x, omega0, omega);
}

/// Block Laplacian over spec.nodes (in order) plus shunt blocks on the diagonal.
CMatrix assemble(const NetworkSpec& spec, double omega);

/// Schur complement keeping the 2x2 blocks listed in `keep` (block indices, in order).
CMatrix kron_reduce(const CMatrix& y_full, const std::vector<std::size_t>& keep, double omega = 0.0);

/// Reduced grid admittance seen at the converter terminals.
class GridAdmittanceEvaluator {
public:
    explicit GridAdmittanceEvaluator(NetworkSpec spec);

    CMatrix operator()(double omega) const;
    std::size_t converter_count() const { return spec_.converter_nodes.size(); }
    const NetworkSpec& spec() const { return spec_; }
    /// Position of a converter node in the reduced matrix (block index).
    std::size_t block_of(int node) const;

private:
    NetworkSpec spec_;
    std::vector<std::size_t> live_;  ///< indices into spec.nodes that are not grounded
    std::vector<std::size_t> keep_;  ///< converter positions within live_
};

} // namespace srgcert
