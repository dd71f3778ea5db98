#include "hdlss/projection_pursuit.hpp"

#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "hdlss/error.hpp"
#include "order_stats.hpp"

namespace hdlss {

namespace {

struct Projected {
  UnivariateEstimate j;
  UnivariateEstimate k;
};

Projected estimate_sides(const Eigen::VectorXd& proj, Eigen::Index n_j, UnivariateKind kind,
                         const UnivariateTuning& tuning) {
  const std::span<const double> all(proj.data(), static_cast<std::size_t>(proj.size()));
  return {univariate(all.subspan(0, static_cast<std::size_t>(n_j)), kind, tuning),
          univariate(all.subspan(static_cast<std::size_t>(n_j)), kind, tuning)};
}

double index_of(const Eigen::VectorXd& proj, Eigen::Index n_j, UnivariateKind kind, const UnivariateTuning& tuning) {
  const std::span<const double> all(proj.data(), static_cast<std::size_t>(proj.size()));
  return pp_index(all.subspan(0, static_cast<std::size_t>(n_j)), all.subspan(static_cast<std::size_t>(n_j)), kind,
                  tuning);
}

Eigen::VectorXd coordinatewise_location(const Eigen::MatrixXd& rows, UnivariateKind kind,
                                        const UnivariateTuning& tuning) {
  Eigen::VectorXd out(rows.cols());
  std::vector<double> column(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      column[static_cast<std::size_t>(r)] = rows(r, c);
    }
    out(c) = univariate(column, kind, tuning).location;
  }
  return out;
}

// Best direction found so far for one class pair. Data-point difference
// candidates stay implicit (row pair) until they win.
struct Incumbent {
  double index = -1.0;
  std::optional<Eigen::VectorXd> explicit_direction;
  Eigen::Index row_a = -1;
  Eigen::Index row_b = -1;
};

PPPair fit_pair(const Eigen::MatrixXd& xj, const Eigen::MatrixXd& xk, int class_j, int class_k, UnivariateKind kind,
                const PpOptions& options, Rng& rng) {
  const Eigen::Index n_j = xj.rows();
  const Eigen::Index m = xj.rows() + xk.rows();
  const Eigen::Index p = xj.cols();
  Eigen::MatrixXd z(m, p);
  z << xj, xk;

  Incumbent best;
  auto offer_explicit = [&](Eigen::VectorXd dir) {
    const double norm = dir.norm();
    if (!(norm > 0.0)) {
      return;
    }
    dir /= norm;
    const double idx = index_of(z * dir, n_j, kind, options.tuning);
    if (idx > best.index) {
      best.index = idx;
      best.explicit_direction = std::move(dir);
    }
  };

  // robust-center differences
  const Eigen::VectorXd center_diff =
      coordinatewise_location(xj, kind, options.tuning) - coordinatewise_location(xk, kind, options.tuning);
  offer_explicit(center_diff);
  if (kind != UnivariateKind::median_mad) {
    offer_explicit(coordinatewise_location(xj, UnivariateKind::median_mad, options.tuning) -
                   coordinatewise_location(xk, UnivariateKind::median_mad, options.tuning));
  }

  // seeded random unit directions
  for (int r = 0; r < options.random_directions; ++r) {
    Eigen::VectorXd dir(p);
    for (Eigen::Index c = 0; c < p; ++c) {
      dir(c) = standard_normal(rng);
    }
    offer_explicit(std::move(dir));
  }

  // between-class data-point differences through the Gram matrix
  if (static_cast<std::size_t>(m) <= options.pairwise_limit) {
    const Eigen::MatrixXd gram = z * z.transpose();
    Eigen::VectorXd proj(m);
    for (Eigen::Index a = 0; a < n_j; ++a) {
      for (Eigen::Index b = n_j; b < m; ++b) {
        const double norm2 = gram(a, a) + gram(b, b) - 2.0 * gram(a, b);
        if (!(norm2 > 0.0)) {
          continue;
        }
        proj = (gram.col(a) - gram.col(b)) / std::sqrt(norm2);
        const double idx = index_of(proj, n_j, kind, options.tuning);
        if (idx > best.index) {
          best.index = idx;
          best.explicit_direction.reset();
          best.row_a = a;
          best.row_b = b;
        }
      }
    }
  }

  if (best.index < 0.0) {
    throw FitError(fmt::format("projection pursuit: both classes {} and {} have zero scale along every "
                               "candidate direction",
                               class_j, class_k));
  }

  Eigen::VectorXd dir =
      best.explicit_direction ? *best.explicit_direction : Eigen::VectorXd(z.row(best.row_a) - z.row(best.row_b));
  dir.normalize();

  // coordinate-wise perturbation refinement
  double step = options.initial_step;
  double current = index_of(z * dir, n_j, kind, options.tuning);
  for (int round = 0; round < options.refine_rounds; ++round) {
    std::vector<std::size_t> coords;
    if (static_cast<Eigen::Index>(options.refine_coordinates) >= p) {
      coords.resize(static_cast<std::size_t>(p));
      for (std::size_t c = 0; c < coords.size(); ++c) {
        coords[c] = c;
      }
    } else {
      coords = sample_without_replacement(rng, static_cast<std::size_t>(p),
                                          static_cast<std::size_t>(options.refine_coordinates));
    }
    Eigen::VectorXd proj = z * dir;
    bool improved = false;
    for (std::size_t c : coords) {
      const auto col = static_cast<Eigen::Index>(c);
      for (double sign : {1.0, -1.0}) {
        const double t = sign * step;
        const double norm = std::sqrt(1.0 + 2.0 * t * dir(col) + t * t);
        if (!(norm > 0.0)) {
          continue;
        }
        const Eigen::VectorXd trial = (proj + t * z.col(col)) / norm;
        const double idx = index_of(trial, n_j, kind, options.tuning);
        if (idx > current) {
          current = idx;
          dir(col) += t;
          dir /= norm;
          proj = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
    }
  }
  dir.normalize();

  const Eigen::VectorXd proj = z * dir;
  const Projected est = estimate_sides(proj, n_j, kind, options.tuning);
  PPPair pair;
  pair.class_j = class_j;
  pair.class_k = class_k;
  pair.direction = dir;
  pair.index = current;
  const double s_sum = est.j.scale + est.k.scale;
  pair.cutoff = s_sum > 0.0 ? (est.j.location * est.k.scale + est.k.location * est.j.scale) / s_sum
                            : 0.5 * (est.j.location + est.k.location);
  pair.orientation = est.j.location >= est.k.location ? 1 : -1;
  return pair;
}

} // namespace

double pp_index(std::span<const double> proj_j, std::span<const double> proj_k, UnivariateKind kind,
                const UnivariateTuning& tuning) {
  const UnivariateEstimate ej = univariate(proj_j, kind, tuning);
  const UnivariateEstimate ek = univariate(proj_k, kind, tuning);
  const double s = ej.scale + ek.scale;
  if (!(s > 0.0)) {
    return -1.0;
  }
  return std::abs(ej.location - ek.location) / s;
}

PPModel pp_fit(const LabeledDataset& train, UnivariateKind kind, const PpOptions& options) {
  const int g = train.num_classes();
  if (g < 2) {
    throw FitError("projection pursuit needs at least 2 classes");
  }
  std::vector<Eigen::MatrixXd> rows;
  for (int k = 1; k <= g; ++k) {
    rows.push_back(train.class_rows(k));
    if (rows.back().rows() < 3) {
      throw FitError(fmt::format("projection pursuit needs at least 3 rows per class; class {} has {}", k,
                                 rows.back().rows()));
    }
  }
  PPModel model;
  model.estimator_kind = kind;
  model.num_classes = g;
  std::uint64_t pair_index = 0;
  for (int j = 1; j <= g; ++j) {
    for (int k = j + 1; k <= g; ++k) {
      Rng rng(derive_seed(options.seed, pair_index++));
      model.pairs.push_back(fit_pair(rows[static_cast<std::size_t>(j - 1)], rows[static_cast<std::size_t>(k - 1)], j,
                                     k, kind, options, rng));
    }
  }
  return model;
}

int pp_predict(const PPModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (model.pairs.empty()) {
    throw InputError("projection pursuit model has no pairs");
  }
  const Eigen::Index p = model.pairs.front().direction.size();
  if (x.size() != p) {
    throw InputError(fmt::format("dimension mismatch: model has p = {}, input has {}", p, x.size()));
  }
  std::vector<int> votes(static_cast<std::size_t>(model.num_classes), 0);
  std::vector<double> margins(static_cast<std::size_t>(model.num_classes), 0.0);
  for (const auto& pair : model.pairs) {
    const double side = pair.orientation * (pair.direction.dot(x) - pair.cutoff);
    const int winner = side >= 0.0 ? (side > 0.0 ? pair.class_j : std::min(pair.class_j, pair.class_k)) : pair.class_k;
    ++votes[static_cast<std::size_t>(winner - 1)];
    margins[static_cast<std::size_t>(winner - 1)] += std::abs(side);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && margins[c] > margins[best])) {
      best = c;
    }
  }
  return static_cast<int>(best) + 1;
}

} // namespace hdlss
