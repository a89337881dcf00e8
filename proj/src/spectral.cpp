#include "fc/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fc {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(LateralBC::Kind k) {
  switch (k) {
    case LateralBC::Kind::dirichlet: return "dirichlet";
    case LateralBC::Kind::neumann: return "neumann";
    case LateralBC::Kind::robin: return "robin";
  }
  return "?";
}

LateralBC::Kind lateral_kind_from_string(const std::string& s) {
  if (s == "dirichlet" || s == "D") return LateralBC::Kind::dirichlet;
  if (s == "neumann" || s == "N") return LateralBC::Kind::neumann;
  if (s == "robin" || s == "impedance" || s == "R") return LateralBC::Kind::robin;
  throw std::invalid_argument("unknown lateral condition '" + s + "'");
}

std::vector<double> uniform_grid(double L, int N) {
  std::vector<double> x(N);
  const double h = L / (N - 1);
  for (int i = 0; i < N; ++i) x[i] = i * h;
  x[N - 1] = L;
  return x;
}

std::vector<double> trapezoid_weights(double L, int N) {
  const double h = L / (N - 1);
  std::vector<double> w(N, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

double l2norm(const std::vector<double>& f, double h) {
  std::vector<double> sq(f.size());
  for (size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return std::sqrt(trapezoid(sq, h));
}

double EigenBasis::sqrt_lambda(int j) const { return std::sqrt(std::max(0.0, lambdas[j])); }

double robin_characteristic(double k, double sigma, double L) {
  double F = (sigma * sigma - k * k) * std::sin(k * L) + 2.0 * sigma * k * std::cos(k * L);
  return F / (sigma * sigma + k * k);
}

namespace {

double robin_root(int j, double sigma, double L) {
  // j-th root lies in ((j-1) pi/L, j pi/L)
  double a = (j - 1) * kPi / L, b = j * kPi / L;
  if (j == 1) a = 1e-14 * b;
  double fa = robin_characteristic(a, sigma, L), fb = robin_characteristic(b, sigma, L);
  if (fa * fb > 0.0)
    throw std::runtime_error("build_basis: Robin root bracketing failed for mode " + std::to_string(j));
  for (int it = 0; it < 300 && b - a > 1e-16 * b; ++it) {
    double m = 0.5 * (a + b);
    double fm = robin_characteristic(m, sigma, L);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  double k = 0.5 * (a + b);
  if (std::fabs(robin_characteristic(k, sigma, L)) > 1e-12)
    throw std::runtime_error("build_basis: Robin root not converged for mode " + std::to_string(j));
  return k;
}

}  // namespace

BasisPtr build_basis(double L, const LateralBC& bc, int J, int N) {
  if (!(L > 0.0)) throw std::invalid_argument("build_basis: L must be > 0");
  if (N < 4) throw std::invalid_argument("build_basis: N too small");
  if (J <= 0) J = N / 4;
  if (N < 4 * J)
    throw std::invalid_argument("build_basis: resolution rule N >= 4J violated (N=" + std::to_string(N) +
                                ", J=" + std::to_string(J) + ")");
  if (bc.kind == LateralBC::Kind::robin && !(bc.robin_coeff > 0.0 && std::isfinite(bc.robin_coeff)))
    throw std::invalid_argument("build_basis: robin_coeff must be finite and > 0");

  auto B = std::make_shared<EigenBasis>();
  B->L = L;
  B->bc = bc;
  B->J = J;
  B->N = N;
  B->h = L / (N - 1);
  B->x = uniform_grid(L, N);
  B->w = trapezoid_weights(L, N);
  B->lambdas.resize(J);
  B->modes.resize(N, J);

  for (int j = 0; j < J; ++j) {
    switch (bc.kind) {
      case LateralBC::Kind::dirichlet: {
        double k = (j + 1) * kPi / L;
        B->lambdas[j] = k * k;
        for (int i = 0; i < N; ++i) B->modes(i, j) = std::sqrt(2.0 / L) * std::sin(k * B->x[i]);
        break;
      }
      case LateralBC::Kind::neumann: {
        double k = j * kPi / L;
        B->lambdas[j] = k * k;
        double s = j == 0 ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L);
        for (int i = 0; i < N; ++i) B->modes(i, j) = s * std::cos(k * B->x[i]);
        break;
      }
      case LateralBC::Kind::robin: {
        double sg = bc.robin_coeff;
        double k = robin_root(j + 1, sg, L);
        B->lambdas[j] = k * k;
        for (int i = 0; i < N; ++i) B->modes(i, j) = k * std::cos(k * B->x[i]) + sg * std::sin(k * B->x[i]);
        break;
      }
    }
  }

  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(B->w.data(), N);
  if (bc.kind == LateralBC::Kind::robin) {
    // Loewdin orthonormalisation in the trapezoid inner product
    Eigen::MatrixXd G = B->modes.transpose() * w.asDiagonal() * B->modes;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::MatrixXd Sinv = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                           es.eigenvectors().transpose();
    B->modes = B->modes * Sinv;
    for (int j = 0; j < J; ++j)
      if (B->modes(0, j) < 0.0 || (B->modes(0, j) == 0.0 && B->modes(1, j) < 0.0)) B->modes.col(j) *= -1.0;
  }
  return B;
}

SpectralCoeffs analyze(const std::vector<double>& samples, const BasisPtr& basis) {
  if (static_cast<int>(samples.size()) != basis->N)
    throw std::invalid_argument("analyze: length mismatch");
  Eigen::VectorXd s(basis->N);
  for (int i = 0; i < basis->N; ++i) s[i] = samples[i] * basis->w[i];
  return {basis, basis->modes.transpose() * s};
}

std::vector<double> synthesize(const SpectralCoeffs& coeffs) {
  if (coeffs.c.size() != coeffs.basis->J) throw std::invalid_argument("synthesize: length mismatch");
  Eigen::VectorXd v = coeffs.basis->modes * coeffs.c;
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd cosine_matrix(const std::vector<double>& x, double L, int K) {
  Eigen::MatrixXd C(x.size(), K);
  for (size_t i = 0; i < x.size(); ++i)
    for (int k = 0; k < K; ++k) C(i, k) = std::cos(k * kPi * x[i] / L);
  return C;
}

Eigen::MatrixXd cosine_dmatrix(const std::vector<double>& x, double L, int K) {
  Eigen::MatrixXd C(x.size(), K);
  for (size_t i = 0; i < x.size(); ++i)
    for (int k = 0; k < K; ++k) C(i, k) = -k * kPi / L * std::sin(k * kPi * x[i] / L);
  return C;
}

std::vector<double> project_cosine(const std::vector<double>& f, double L, int K) {
  const int N = static_cast<int>(f.size());
  auto x = uniform_grid(L, N);
  auto w = trapezoid_weights(L, N);
  Eigen::MatrixXd C = cosine_matrix(x, L, K);
  Eigen::VectorXd W = Eigen::Map<const Eigen::VectorXd>(w.data(), N);
  Eigen::VectorXd F = Eigen::Map<const Eigen::VectorXd>(f.data(), N);
  Eigen::MatrixXd G = C.transpose() * W.asDiagonal() * C;
  Eigen::VectorXd c = G.ldlt().solve(C.transpose() * W.asDiagonal() * F);
  Eigen::VectorXd r = C * c;
  return std::vector<double>(r.data(), r.data() + N);
}

}  // namespace fc
