#include "yfstab/quadrature.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>

namespace yfstab {
namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come from
// the first components of the eigenvectors.
Rule golub_welsch(int n, double mu0, auto offdiag) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  // Symmetrize against eigen-solver roundoff; both weight functions are even.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const Rule& cached(std::map<int, Rule>& cache, std::mutex& mu, int n, auto make) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature rule order must be >= 1");
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, [](int k) {
    return golub_welsch(k, 2.0, [](int i) { return i / std::sqrt(4.0 * i * i - 1.0); });
  });
}

const Rule& gauss_hermite(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, [](int k) {
    return golub_welsch(k, std::sqrt(M_PI), [](int i) { return std::sqrt(0.5 * i); });
  });
}

}  // namespace yfstab
