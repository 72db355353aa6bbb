#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpnet/laplacian.hpp"
#include "lpnet/network.hpp"
#include "lpnet/state.hpp"

namespace lpnet {

enum class SpinClass { Ferromagnetic, AntiFerromagnetic, Mixed };

std::string to_string(SpinClass c);

/// One spectral equilibrium. Momentum coupling: L state = eigenvalue *
/// state. Position coupling: L(lambda1) Gamma = -eigenvalue * Gamma (the
/// stored eigenvalue is lambda2) and Pi = -lambda1 * I * Gamma.
struct EquilibriumRecord {
  LatticeState state;
  double eigenvalue = 0.0;  // lambda_e, or lambda2 in the position case
  double lambda1 = 0.0;     // position case only
  int multiplicity = 1;     // size of the eigen-group this record belongs to
  int group = 0;            // index of the eigen-group
  SpinClass spin_class = SpinClass::Mixed;
  bool group_mixed = false;  // group members fall into different classes
  CasimirLevels casimirs;
  double spectral_abscissa =
      std::numeric_limits<double>::quiet_NaN();  // filled by a stability pass
};

/// All 3N eigenvector equilibria of the momentum Laplacian, rescaled to the
/// summed Casimir level C = a, sorted by ascending eigenvalue. Eigenvalues
/// within a relative gap of 1e-8 are grouped; classification is per record.
std::vector<EquilibriumRecord> momentum_equilibria(const Network& net,
                                                   double casimir_a);

/// All 3N eigenvector equilibria of the position Laplacian at fixed
/// lambda1, with Gamma rescaled to C2 = c2 and Pi = -lambda1 I Gamma.
/// Records are sorted by ascending lambda2.
std::vector<EquilibriumRecord> position_equilibria(const Network& net,
                                                   double lambda1, double c2);

/// Ferromagnetic if mu_i / sqrt(d_i) agree across nodes (relative 1e-8);
/// anti-ferromagnetic if sum_i sqrt(d_i) mu_i vanishes relative to the
/// state norm; mixed otherwise. Uses Gamma in the heavy-top variant.
SpinClass classify(const Network& net, const LatticeState& state);

/// Linearisation hat(Pi_e) (L - lambda_e 1) of the momentum-coupled flow.
Eigen::MatrixXd linearize_momentum(const Network& net,
                                   const EquilibriumRecord& record);

/// 6N x 6N linearisation of the heavy-top flow about the record.
Eigen::MatrixXd linearize_position(const Network& net,
                                   const EquilibriumRecord& record);

/// Max real part of the spectrum of a dense matrix (values with
/// |Re| < 1e-8 are clamped to zero). Throws EigensolverError on failure.
double spectral_abscissa(const Eigen::MatrixXd& m);

/// Abscissa of the momentum linearisation computed on the 2m-dimensional
/// complement of the per-node kernels of hat(Pi_i); equivalent to
/// spectral_abscissa(linearize_momentum(...)) but cheaper.
double momentum_abscissa(const Network& net, const EquilibriumRecord& record);

/// Fill `spectral_abscissa` for every record. One dense eigensolve per
/// eigen-group (group members share the representative's value); groups run
/// in parallel on `threads` workers (0 = hardware concurrency).
void stability_pass(const Network& net, std::vector<EquilibriumRecord>& records,
                    int threads = 0);

enum class Definiteness {
  PositiveDefinite,
  PositiveSemidefinite,
  NegativeDefinite,
  NegativeSemidefinite,
  Indefinite,
};

std::string to_string(Definiteness d);

struct DefinitenessVerdict {
  Definiteness kind = Definiteness::Indefinite;
  int zero_count = 0;  // eigenvalues within tolerance of zero
};

/// Energy-Casimir Hessian (L - lambda_e) + phi'' mu_e mu_e^T on the full
/// space.
DefinitenessVerdict energy_casimir_test_momentum(const Network& net,
                                                 const EquilibriumRecord& record,
                                                 double phi_second);

/// Checks X = Ibar^{-1} > 0 and classifies the Schur complement
/// B = L(lambda1) + lambda2 + lambda2_hat * Gamma_e Gamma_e^T.
DefinitenessVerdict energy_casimir_test_position(const Network& net,
                                                 const EquilibriumRecord& record,
                                                 double lambda2_hat);

}  // namespace lpnet
