#pragma once

#include "swmlda/weights.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace swmlda {

/// Weighted scatter matrices over a training split.  classes carries the
/// label count so the projection rank cap C-1 travels with the scatters.
struct ScatterSet {
  Eigen::MatrixXd Sw;  // within-class scatter, D x D
  Eigen::MatrixXd Sb;  // between-class scatter, D x D
  Eigen::MatrixXd St;  // total scatter, D x D; St = Sw + Sb
  double n = 0.0;      // total weight mass
  Eigen::Index classes = 0;
};

/// Which scatter the between-class scatter is maximized against.
enum class ScatterPair { b_over_t, b_over_w };

ScatterPair scatter_pair_from_code(const std::string& code);
std::string scatter_pair_code(ScatterPair pair);

/// Fitted discriminant subspace.
struct Projection {
  Eigen::MatrixXd W;             // D x d, columns are discriminant directions
  Eigen::VectorXd eigenvalues;   // length d, descending, positive
  double energy_threshold = 0.999;
  double ridge = 0.0;            // resolved regularizer actually applied
};

/// Builds S_w, S_b, S_t from instance weights.  Rows of P are rescaled by
/// the inverse square root of their mass, which leaves already-normalized
/// rows untouched and puts raw membership weights on the same footing.  The
/// instance mass vector and its total always come from P as given.
ScatterSet scatter_matrices(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P);

/// Solves S_b v = lambda (S_pair + ridge I) v by whitening S_pair, keeps the
/// leading eigenvectors whose eigenvalue mass reaches the energy threshold,
/// and caps the dimension at classes - 1.  An absent ridge resolves to
/// 1e-8 * trace(S_pair) / D.
Projection fit_projection(const ScatterSet& scatter, ScatterPair pair, double energy,
                          std::optional<double> ridge = std::nullopt);

/// Fits the same projection straight from (X, P).  When the feature count
/// exceeds the instance count the solve runs in the span of the instances
/// via the Gram matrix, so the D x D scatters are never materialized; the
/// result matches the scatter-based fit.
Projection fit_projection_from_data(const Eigen::MatrixXd& X, const Eigen::MatrixXd& P,
                                    ScatterPair pair, double energy,
                                    std::optional<double> ridge = std::nullopt);

/// Z = W^T X.
Eigen::MatrixXd transform(const Projection& proj, const Eigen::MatrixXd& X);

}  // namespace swmlda
