#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lqm/linalg.hpp"

namespace lqm {

/// Observable resolved into distinct eigenvalues and orthogonal projections,
/// a = sum_j eigenvalues[j] * projections[j].
struct SpectralObservable {
    Eigen::VectorXd eigenvalues;       // ascending, distinct after clustering
    std::vector<Operator> projections; // Hermitian, idempotent, mutually orthogonal, sum to I

    Index dim() const { return projections.empty() ? 0 : projections.front().dim(); }
    int outcomes() const { return static_cast<int>(projections.size()); }
    Operator reconstruct() const;
};

/// Cluster the spectrum of a Hermitian operator with the given gap threshold
/// (default 1e-9 * spectral norm) and build the projection family.
SpectralObservable spectral_decompose(const Operator& a, double tol = -1.0);

/// Place an operator on the listed composite factors (identity elsewhere).
/// `targets` is ordered: the i-th tensor slot of `op` lands on factor
/// targets[i]. op.dim must equal the product of the target factor dims.
Operator embed(const Operator& op, const std::vector<int>& targets,
               const std::vector<Index>& composite_dims);

/// State analogue of embed: the remaining factors are filled with their
/// lowest basis vector.
State embed_state(const State& local, const std::vector<int>& targets,
                  const std::vector<Index>& composite_dims);

/// Norm-preserving map stored as a square matrix on one fixed composite
/// space. Maps that are rectangular in spirit (adding an apparatus factor)
/// fix a slot basis vector; `domain` is then the projector onto the sector
/// where the map acts isometrically.
struct Isometry {
    Operator matrix;
    std::optional<Operator> domain;                  // projector; absent = whole space
    std::optional<std::vector<int>> declared_support; // factor indices, informational
};

/// ||(W^dag W - I) P||_max with P the domain projector (identity if absent).
double validate_isometry(const Isometry& w);

/// max_{j,k} ||(W_j^dag W_k - delta_jk I) P||_max over the family.
double validate_isometry_family(std::span<const Isometry> family);

/// Traceless Hermitian generators of the d-dimensional matrix algebra
/// (sigma_x, sigma_y, sigma_z for d = 2; generalized Gell-Mann above).
std::vector<Operator> hermitian_basis(Index d);

/// -sum p ln p over the spectrum of a density operator.
double von_neumann_entropy(const Operator& rho);

/// Schmidt coefficients of a pure state across the cut (listed factors | rest),
/// descending.
Eigen::VectorXd schmidt_coefficients(const State& psi, const std::vector<int>& left_factors);

} // namespace lqm
