#pragma once

#include <Eigen/Dense>

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace danneal {

// One realization L = D - A of the communication graph: symmetric, zero row
// sums, off-diagonal entries in {0, -1}, diagonal = vertex degrees.
struct LaplacianSample {
    Eigen::MatrixXi laplacian;

    int n_agents() const { return static_cast<int>(laplacian.rows()); }
};

// Agents l adjacent to n, i.e. {l : laplacian(n, l) = -1}. Zero-based.
std::vector<int> neighbors(const LaplacianSample& sample, int n);

// Random-topology family: either a fixed base graph repeated every
// iteration, or independent per-edge activation over the base graph with
// probability p (mean Laplacian exactly p * L_base).
struct GraphModel {
    enum class Kind { Fixed, EdgeActivation };

    Kind kind = Kind::Fixed;
    Eigen::MatrixXi base_adjacency;  // symmetric 0/1, zero diagonal
    double activation_p = 1.0;       // EdgeActivation only; in (0, 1]

    int n_agents() const { return static_cast<int>(base_adjacency.rows()); }
    std::vector<std::string> violations() const;
    void validate() const;  // throws std::invalid_argument
};

// Named base topologies, zero-based vertex labels.
Eigen::MatrixXi ring_adjacency(int n);      // n >= 3
Eigen::MatrixXi complete_adjacency(int n);  // n >= 2
Eigen::MatrixXi path_adjacency(int n);      // n >= 2
Eigen::MatrixXi star_adjacency(int n);      // n >= 2; vertex 0 is the hub
Eigen::MatrixXi adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

Eigen::MatrixXi laplacian_from_adjacency(const Eigen::MatrixXi& adjacency);

// Draws one Laplacian. Fixed returns the base graph and consumes no
// randomness; EdgeActivation keeps each base edge independently with
// probability p, one Bernoulli per edge in upper-triangle row order.
LaplacianSample sample(const GraphModel& model, std::mt19937_64& rng);

// Exact mean Laplacian: L_base for Fixed, p * L_base for EdgeActivation.
Eigen::MatrixXd mean_laplacian(const GraphModel& model);

// Second-smallest eigenvalue of the mean Laplacian (algebraic connectivity);
// positive iff the positive-probability edges form a connected graph.
// Requires n_agents >= 2.
double lambda2_of_mean(const GraphModel& model);

}  // namespace danneal
