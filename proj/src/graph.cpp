#include "danneal/graph.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>
#include <stdexcept>

namespace danneal {

Eigen::MatrixXi laplacian_from_adjacency(const Eigen::MatrixXi& adjacency) {
    Eigen::MatrixXi lap = -adjacency;
    lap.diagonal() = adjacency.rowwise().sum();
    return lap;
}

std::vector<int> neighbors(const LaplacianSample& sample, int n) {
    const int size = sample.n_agents();
    if (n < 0 || n >= size) throw std::out_of_range("neighbors: agent index out of range");
    std::vector<int> out;
    for (int l = 0; l < size; ++l) {
        if (l != n && sample.laplacian(n, l) == -1) out.push_back(l);
    }
    return out;
}

std::vector<std::string> GraphModel::violations() const {
    std::vector<std::string> v;
    const auto& a = base_adjacency;
    if (a.rows() < 1 || a.rows() != a.cols()) {
        v.push_back("base adjacency must be square and non-empty");
        return v;
    }
    if ((a.array() != a.transpose().array()).any()) v.push_back("base adjacency must be symmetric");
    if ((a.diagonal().array() != 0).any()) v.push_back("base adjacency must have zero diagonal");
    if (((a.array() != 0) && (a.array() != 1)).any()) v.push_back("base adjacency entries must be 0 or 1");
    if (kind == Kind::EdgeActivation && !(activation_p > 0.0 && activation_p <= 1.0)) {
        v.push_back("activation probability must lie in (0, 1]");
    }
    return v;
}

void GraphModel::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid graph model:";
    for (const auto& s : v) msg << " [" << s << "]";
    throw std::invalid_argument(msg.str());
}

Eigen::MatrixXi ring_adjacency(int n) {
    if (n < 3) throw std::invalid_argument("ring_adjacency: needs n >= 3");
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        a(i, j) = a(j, i) = 1;
    }
    return a;
}

Eigen::MatrixXi complete_adjacency(int n) {
    if (n < 2) throw std::invalid_argument("complete_adjacency: needs n >= 2");
    Eigen::MatrixXi a = Eigen::MatrixXi::Ones(n, n);
    a.diagonal().setZero();
    return a;
}

Eigen::MatrixXi path_adjacency(int n) {
    if (n < 2) throw std::invalid_argument("path_adjacency: needs n >= 2");
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1;
    return a;
}

Eigen::MatrixXi star_adjacency(int n) {
    if (n < 2) throw std::invalid_argument("star_adjacency: needs n >= 2");
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
    for (int i = 1; i < n; ++i) a(0, i) = a(i, 0) = 1;
    return a;
}

Eigen::MatrixXi adjacency_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 1) throw std::invalid_argument("adjacency_from_edges: needs n >= 1");
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw std::invalid_argument("adjacency_from_edges: vertex index out of range");
        }
        if (i == j) throw std::invalid_argument("adjacency_from_edges: self-loops are not allowed");
        a(i, j) = a(j, i) = 1;
    }
    return a;
}

LaplacianSample sample(const GraphModel& model, std::mt19937_64& rng) {
    if (model.kind == GraphModel::Kind::Fixed) {
        return {laplacian_from_adjacency(model.base_adjacency)};
    }
    const int n = model.n_agents();
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(n, n);
    std::bernoulli_distribution keep(model.activation_p);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (model.base_adjacency(i, j) != 0 && keep(rng)) adj(i, j) = adj(j, i) = 1;
        }
    }
    return {laplacian_from_adjacency(adj)};
}

Eigen::MatrixXd mean_laplacian(const GraphModel& model) {
    const double p = model.kind == GraphModel::Kind::EdgeActivation ? model.activation_p : 1.0;
    return p * laplacian_from_adjacency(model.base_adjacency).cast<double>();
}

double lambda2_of_mean(const GraphModel& model) {
    if (model.n_agents() < 2) {
        throw std::invalid_argument("lambda2_of_mean: needs at least two agents");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mean_laplacian(model),
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(1);  // eigenvalues come back ascending
}

}  // namespace danneal
