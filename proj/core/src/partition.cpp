#include "sze/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sze/error.hpp"
#include "sze/parallel.hpp"
#include "sze/rng.hpp"

namespace sze {
namespace {

// Bipartite adjacency: rows follow `rows`, columns follow `cols`.
Eigen::MatrixXd bipartite_block(const Graph& g, const VertexSet& rows, const VertexSet& cols) {
  const auto& w = g.weights();
  Eigen::MatrixXd h(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t b = 0; b < cols.size(); ++b) {
    for (std::size_t a = 0; a < rows.size(); ++a) {
      h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          w(static_cast<Eigen::Index>(rows[a]), static_cast<Eigen::Index>(cols[b]));
    }
  }
  return h;
}

void require_equal_classes(const VertexSet& a, const VertexSet& b) {
  if (a.empty() || a.size() != b.size()) {
    throw PreconditionError("pair check: classes must be nonempty and of equal size");
  }
  if (!a.disjoint(b)) throw PreconditionError("pair check: classes overlap");
}

// Density of the sub-block (xs, ys) given as positions into the block `h`.
double block_density(const Eigen::MatrixXd& h, std::span<const std::size_t> xs,
                     std::span<const std::size_t> ys) {
  double total = 0.0;
  for (auto b : ys) {
    for (auto a : xs) total += h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return total / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

VertexSet pick(const VertexSet& base, std::span<const std::size_t> positions) {
  std::vector<Vertex> members;
  members.reserve(positions.size());
  for (auto p : positions) members.push_back(base[p]);
  return VertexSet(std::move(members));
}

// Sum over unordered distinct pairs of `ys`, divided by |ys|^2.
double pair_average(const Eigen::MatrixXd& sigma, std::span<const std::size_t> ys) {
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      total += sigma(static_cast<Eigen::Index>(ys[i]), static_cast<Eigen::Index>(ys[j]));
    }
  }
  const double size = static_cast<double>(ys.size());
  return total / (size * size);
}

class PairChecker {
 public:
  PairChecker(const Graph& g, const VertexSet& c_r, const VertexSet& c_s, double epsilon)
      : c_r_(c_r),
        c_s_(c_s),
        h_(bipartite_block(g, c_r, c_s)),
        c_(static_cast<double>(c_r.size())),
        eps4c_(std::pow(epsilon, 4) * c_),
        eps3c_(std::pow(epsilon, 3) * c_),
        min_size_(std::pow(epsilon, 4) / 16.0 * c_),
        eps4_(std::pow(epsilon, 4)) {
    if (!(h_.array() == 0.0 || h_.array() == 1.0).all()) {
      throw PreconditionError("pair check: graph must be binarized");
    }
    degrees_ = h_.colwise().sum().transpose();
    average_degree_ = degrees_.mean();
    pair_density_ = h_.sum() / (c_ * c_);
  }

  PairStatus run() {
    if (average_degree_ < eps3c_) return {Verdict::regular, Condition::low_density, std::nullopt};

    const auto order = by_degree_deviation();
    const auto deviating = static_cast<double>(std::count_if(
        order.begin(), order.end(), [&](std::size_t y) { return deviation(y) >= eps4c_; }));
    if (deviating > eps4c_ / 8.0) {
      for (std::size_t t = 0; t < std::min(order.size(), max_candidates); ++t) {
        if (auto cert = neighbourhood_certificate(order[t])) {
          return {Verdict::irregular, Condition::degree_deviation, std::move(cert)};
        }
      }
      // Every member of the majority side deviates by >= eps^4 c, so this
      // certificate is valid by construction.
      return {Verdict::irregular, Condition::degree_deviation, degree_certificate()};
    }

    sigma_ = h_.transpose() * h_;
    sigma_.array() -= average_degree_ * average_degree_ / c_;
    std::vector<std::size_t> candidates(c_s_.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    Eigen::VectorXd excess = sigma_.rowwise().sum() - sigma_.diagonal();
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return excess(a) > excess(b); });

    bool deviation_found = false;
    for (std::size_t t = 0; t < std::min(candidates.size(), max_candidates); ++t) {
      const auto ys = high_deviation_partners(candidates[t]);
      if (pair_average(sigma_, ys) < eps3c_ / 2.0) continue;
      deviation_found = true;
      if (auto cert = neighbourhood_certificate(candidates[t])) {
        return {Verdict::irregular, Condition::subset_deviation, std::move(cert)};
      }
    }
    if (!deviation_found) return {Verdict::regular, Condition::none, std::nullopt};
    if (auto cert = degree_certificate(); cert && valid(*cert)) {
      return {Verdict::irregular, Condition::subset_deviation, std::move(cert)};
    }
    return {Verdict::unverified, Condition::subset_deviation, std::nullopt};
  }

 private:
  static constexpr std::size_t max_candidates = 64;

  double deviation(std::size_t y) const { return std::abs(degrees_(static_cast<Eigen::Index>(y)) - average_degree_); }

  std::vector<std::size_t> by_degree_deviation() const {
    std::vector<std::size_t> order(c_s_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return deviation(a) > deviation(b); });
    return order;
  }

  // y0 together with every y whose common neighbourhood with y0 exceeds the
  // expectation by at least 2 eps^4 c.
  std::vector<std::size_t> high_deviation_partners(std::size_t y0) {
    if (sigma_.size() == 0) {
      sigma_ = h_.transpose() * h_;
      sigma_.array() -= average_degree_ * average_degree_ / c_;
    }
    std::vector<std::size_t> ys;
    for (std::size_t y = 0; y < c_s_.size(); ++y) {
      if (y == y0 || sigma_(static_cast<Eigen::Index>(y0), static_cast<Eigen::Index>(y)) >= 2.0 * eps4c_) {
        ys.push_back(y);
      }
    }
    return ys;
  }

  // X = N(y0) ∩ C_r, Y = high-deviation partners of y0.
  std::optional<Certificate> neighbourhood_certificate(std::size_t y0) {
    std::vector<std::size_t> xs;
    for (std::size_t a = 0; a < c_r_.size(); ++a) {
      if (h_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(y0)) != 0.0) xs.push_back(a);
    }
    const auto ys = high_deviation_partners(y0);
    if (xs.empty() || static_cast<double>(xs.size()) < min_size_ ||
        static_cast<double>(ys.size()) < min_size_) {
      return std::nullopt;
    }
    const double gap = std::abs(block_density(h_, xs, ys) - pair_density_);
    if (gap < eps4_) return std::nullopt;
    return Certificate{pick(c_r_, xs), pick(c_s_, ys), gap};
  }

  // X = C_r, Y = the larger side of the vertices deviating by >= eps^4 c.
  std::optional<Certificate> degree_certificate() const {
    std::vector<std::size_t> high;
    std::vector<std::size_t> low;
    for (std::size_t y = 0; y < c_s_.size(); ++y) {
      const double delta = degrees_(static_cast<Eigen::Index>(y)) - average_degree_;
      if (delta >= eps4c_) high.push_back(y);
      if (-delta >= eps4c_) low.push_back(y);
    }
    const auto& ys = high.size() >= low.size() ? high : low;
    if (ys.empty()) return std::nullopt;
    std::vector<std::size_t> xs(c_r_.size());
    std::iota(xs.begin(), xs.end(), std::size_t{0});
    const double gap = std::abs(block_density(h_, xs, ys) - pair_density_);
    return Certificate{c_r_, pick(c_s_, ys), gap};
  }

  bool valid(const Certificate& cert) const {
    return !cert.x.empty() && !cert.y.empty() && static_cast<double>(cert.x.size()) >= min_size_ &&
           static_cast<double>(cert.y.size()) >= min_size_ && cert.density_gap >= eps4_;
  }

  const VertexSet& c_r_;
  const VertexSet& c_s_;
  Eigen::MatrixXd h_;
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd degrees_;
  double c_;
  double eps4c_;
  double eps3c_;
  double min_size_;
  double eps4_;
  double average_degree_ = 0.0;
  double pair_density_ = 0.0;
};

// Indicator matrix (n x k) of class membership.
Eigen::MatrixXd membership(const EquitablePartition& p) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.n),
                                            static_cast<Eigen::Index>(p.class_count()));
  for (std::size_t j = 0; j < p.class_count(); ++j) {
    for (Vertex v : p.classes[j]) m(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j)) = 1.0;
  }
  return m;
}

// Orders vertices so that vertices with the same density profile towards
// the current classes end up adjacent: by strongest class, then strength,
// then the full profile.
void sort_by_profile(std::vector<Vertex>& vertices, const Eigen::MatrixXd& profile) {
  const Eigen::Index k = profile.cols();
  if (k == 0) return;
  auto best = [&](Vertex v) {
    Eigen::Index j = 0;
    profile.row(static_cast<Eigen::Index>(v)).maxCoeff(&j);
    return j;
  };
  std::sort(vertices.begin(), vertices.end(), [&](Vertex a, Vertex b) {
    const auto ra = static_cast<Eigen::Index>(a);
    const auto rb = static_cast<Eigen::Index>(b);
    const auto ja = best(a);
    const auto jb = best(b);
    if (ja != jb) return ja < jb;
    if (profile(ra, ja) != profile(rb, jb)) return profile(ra, ja) > profile(rb, jb);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (profile(ra, j) != profile(rb, j)) return profile(ra, j) > profile(rb, j);
    }
    return a < b;
  });
}

}  // namespace

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::regular: return "regular";
    case Verdict::irregular: return "irregular";
    case Verdict::unverified: return "unverified";
  }
  return "?";
}

const char* to_string(Condition condition) {
  switch (condition) {
    case Condition::none: return "none";
    case Condition::low_density: return "low-density";
    case Condition::degree_deviation: return "degree-deviation";
    case Condition::subset_deviation: return "subset-deviation";
  }
  return "?";
}

std::vector<std::size_t> EquitablePartition::class_of() const {
  std::vector<std::size_t> label(n, no_class);
  for (std::size_t j = 0; j < classes.size(); ++j) {
    for (Vertex v : classes[j]) {
      if (v < n) label[v] = j;
    }
  }
  return label;
}

void EquitablePartition::validate() const {
  const std::size_t c = class_size();
  std::vector<char> seen(n, 0);
  auto mark = [&](const VertexSet& set) {
    for (Vertex v : set) {
      if (v >= n) throw PreconditionError("partition: vertex out of range");
      if (seen[v]) throw PreconditionError("partition: vertex in two classes");
      seen[v] = 1;
    }
  };
  for (const auto& cls : classes) {
    if (cls.size() != c) throw PreconditionError("partition: classes differ in size");
    if (cls.empty()) throw PreconditionError("partition: empty class");
    mark(cls);
  }
  mark(exceptional);
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw PreconditionError("partition: some vertex is unassigned");
  }
}

void PartitionConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must be in (0, 1)");
  if (initial_classes == 0) throw PreconditionError("initial class count must be positive");
  if (max_iterations == 0) throw PreconditionError("max_iterations must be positive");
  if (!(binarize_threshold > 0.0 && binarize_threshold <= 1.0)) {
    throw PreconditionError("binarize threshold must be in (0, 1]");
  }
  if (min_class_size == 0) throw PreconditionError("min_class_size must be positive");
}

EquitablePartition initial_partition(const Graph& g, std::size_t b, std::uint64_t seed) {
  const std::size_t n = g.size();
  if (b == 0 || b > n) {
    throw PreconditionError("initial partition: need 1 <= b <= n (b = " + std::to_string(b) +
                            ", n = " + std::to_string(n) + ")");
  }
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  Rng rng = Rng::derive(seed, 0);
  rng.shuffle(std::span<Vertex>(order));

  const std::size_t c = n / b;
  EquitablePartition p;
  p.n = n;
  for (std::size_t i = 0; i < b; ++i) {
    p.classes.emplace_back(std::vector<Vertex>(order.begin() + static_cast<std::ptrdiff_t>(i * c),
                                               order.begin() + static_cast<std::ptrdiff_t>((i + 1) * c)));
  }
  p.exceptional = VertexSet(std::vector<Vertex>(order.begin() + static_cast<std::ptrdiff_t>(b * c), order.end()));
  return p;
}

double neighborhood_deviation(const Graph& g, const VertexSet& a, const VertexSet& b, Vertex y1,
                              Vertex y2) {
  require_equal_classes(a, b);
  if (y1 == y2) throw PreconditionError("neighborhood deviation: y1 == y2");
  if (!b.contains(y1) || !b.contains(y2)) {
    throw PreconditionError("neighborhood deviation: y1, y2 must belong to b");
  }
  const double c = static_cast<double>(a.size());
  const double d = edge_weight_between(g, a, b) / c;
  double common = 0.0;
  for (Vertex x : a) common += g.weight(x, y1) * g.weight(x, y2);
  return common - d * d / c;
}

Eigen::MatrixXd deviation_matrix(const Graph& g, const VertexSet& a, const VertexSet& b) {
  require_equal_classes(a, b);
  const Eigen::MatrixXd h = bipartite_block(g, a, b);
  const double c = static_cast<double>(a.size());
  const double d = h.sum() / c;
  Eigen::MatrixXd sigma = h.transpose() * h;
  sigma.array() -= d * d / c;
  return sigma;
}

double subset_deviation(const Graph& g, const VertexSet& a, const VertexSet& b, const VertexSet& y) {
  if (y.size() < 2) throw PreconditionError("subset deviation: need at least two vertices");
  std::vector<std::size_t> positions;
  positions.reserve(y.size());
  for (Vertex v : y) {
    const auto it = std::lower_bound(b.begin(), b.end(), v);
    if (it == b.end() || *it != v) throw PreconditionError("subset deviation: y must be a subset of b");
    positions.push_back(static_cast<std::size_t>(it - b.begin()));
  }
  return pair_average(deviation_matrix(g, a, b), positions);
}

PairStatus check_pair_regularity(const Graph& g, const VertexSet& c_r, const VertexSet& c_s,
                                 double epsilon) {
  require_equal_classes(c_r, c_s);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must be in (0, 1)");
  return PairChecker(g, c_r, c_s, epsilon).run();
}

bool certificate_is_sound(const Graph& g, const VertexSet& c_r, const VertexSet& c_s,
                          const Certificate& certificate, double epsilon) {
  const auto& x = certificate.x;
  const auto& y = certificate.y;
  if (x.empty() || y.empty()) return false;
  const auto subset = [](const VertexSet& part, const VertexSet& whole) {
    return std::includes(whole.begin(), whole.end(), part.begin(), part.end());
  };
  if (!subset(x, c_r) || !subset(y, c_s)) return false;
  const double c = static_cast<double>(c_r.size());
  const double eps4 = std::pow(epsilon, 4);
  const double min_size = eps4 / 16.0 * c;
  if (static_cast<double>(x.size()) < min_size || static_cast<double>(y.size()) < min_size) return false;
  const double gap = std::abs(edge_density(g, x, y) - edge_density(g, c_r, c_s));
  return gap >= eps4;
}

std::size_t pair_index(std::size_t r, std::size_t s, std::size_t k) {
  return r * k - r * (r + 1) / 2 + (s - r - 1);
}

std::vector<PairStatus> check_all_pairs(const Graph& g, const EquitablePartition& p, double epsilon) {
  const std::size_t k = p.class_count();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(k * (k - (k > 0)) / 2);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r + 1; s < k; ++s) pairs.emplace_back(r, s);
  }
  std::vector<PairStatus> statuses(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    statuses[i] = check_pair_regularity(g, p.classes[pairs[i].first], p.classes[pairs[i].second], epsilon);
  });
  return statuses;
}

Eigen::MatrixXd class_densities(const Graph& g, const EquitablePartition& p) {
  const double c = static_cast<double>(p.class_size());
  if (p.class_count() == 0) return {};
  const Eigen::MatrixXd m = membership(p);
  Eigen::MatrixXd d = m.transpose() * g.weights() * m / (c * c);
  d.diagonal().setZero();
  return d;
}

Eigen::VectorXd intra_class_densities(const Graph& g, const EquitablePartition& p) {
  const double c = static_cast<double>(p.class_size());
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.class_count()));
  if (c < 2) return d;
  for (std::size_t j = 0; j < p.class_count(); ++j) {
    double total = 0.0;
    for (Vertex u : p.classes[j]) {
      for (Vertex v : p.classes[j]) total += g.weight(u, v);
    }
    d(static_cast<Eigen::Index>(j)) = total / (c * (c - 1.0));
  }
  return d;
}

EquitablePartition refine(const Graph& g, const EquitablePartition& p,
                          std::span<const PairStatus> statuses, const PartitionConfig& config,
                          RefineMode mode, std::uint64_t stream) {
  config.validate();
  const std::size_t k = p.class_count();
  if (statuses.size() != k * (k - (k > 0)) / 2) {
    throw PreconditionError("refine: expected one status per class pair");
  }
  if (std::all_of(statuses.begin(), statuses.end(), [](const PairStatus& s) { return s.is_regular(); })) {
    return p;
  }
  const Graph binary = g.is_binary() ? g : binarize(g, config.binarize_threshold);

  // At most one certified partner per class.
  Rng rng = Rng::derive(config.seed, mix_seed(stream, 0x5eed));
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  constexpr std::size_t unmatched = EquitablePartition::no_class;
  std::vector<std::size_t> partner(k, unmatched);
  for (std::size_t r : order) {
    if (partner[r] != unmatched) continue;
    std::vector<std::size_t> options;
    for (std::size_t s = 0; s < k; ++s) {
      if (s == r || partner[s] != unmatched) continue;
      const auto& status = statuses[pair_index(std::min(r, s), std::max(r, s), k)];
      if (status.verdict == Verdict::irregular) options.push_back(s);
    }
    if (options.empty()) continue;
    const std::size_t s = options[rng.index(options.size())];
    partner[r] = s;
    partner[s] = r;
  }

  const Eigen::MatrixXd profile =
      binary.weights() * membership(p) / static_cast<double>(p.class_size());

  std::vector<std::vector<Vertex>> pieces;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& cls = p.classes[i];
    if (partner[i] == unmatched) {
      pieces.emplace_back(cls.begin(), cls.end());
      continue;
    }
    const std::size_t r = std::min(i, partner[i]);
    const std::size_t s = std::max(i, partner[i]);
    const auto& cert = *statuses[pair_index(r, s, k)].certificate;
    const VertexSet& inside = i == r ? cert.x : cert.y;
    std::vector<Vertex> in;
    std::vector<Vertex> out;
    for (Vertex v : cls) (inside.contains(v) ? in : out).push_back(v);
    if (!in.empty()) pieces.push_back(std::move(in));
    if (!out.empty()) pieces.push_back(std::move(out));
  }

  const std::size_t c = p.class_size();
  const std::size_t target = mode == RefineMode::split ? c / 2 : c;
  const double c0_limit = config.epsilon * static_cast<double>(p.n);
  std::size_t size = 0;
  for (std::size_t cand = target; cand >= config.min_class_size && cand > 0; --cand) {
    std::size_t pooled = p.exceptional.size();
    std::size_t whole = 0;
    for (const auto& piece : pieces) {
      pooled += piece.size() % cand;
      whole += piece.size() / cand;
    }
    if (whole + pooled / cand == 0) continue;
    if (static_cast<double>(pooled % cand) < c0_limit) {
      size = cand;
      break;
    }
  }
  if (size == 0) {
    throw PartitionFailure("refinement cannot keep |C0| < eps n with classes of at least " +
                           std::to_string(config.min_class_size) + " vertices");
  }

  EquitablePartition next;
  next.n = p.n;
  std::vector<Vertex> pool(p.exceptional.begin(), p.exceptional.end());
  for (auto& piece : pieces) {
    sort_by_profile(piece, profile);
    const std::size_t chunks = piece.size() / size;
    for (std::size_t t = 0; t < chunks; ++t) {
      next.classes.emplace_back(std::vector<Vertex>(piece.begin() + static_cast<std::ptrdiff_t>(t * size),
                                                    piece.begin() + static_cast<std::ptrdiff_t>((t + 1) * size)));
    }
    pool.insert(pool.end(), piece.begin() + static_cast<std::ptrdiff_t>(chunks * size), piece.end());
  }
  sort_by_profile(pool, profile);
  const std::size_t chunks = pool.size() / size;
  for (std::size_t t = 0; t < chunks; ++t) {
    next.classes.emplace_back(std::vector<Vertex>(pool.begin() + static_cast<std::ptrdiff_t>(t * size),
                                                  pool.begin() + static_cast<std::ptrdiff_t>((t + 1) * size)));
  }
  next.exceptional = VertexSet(std::vector<Vertex>(pool.begin() + static_cast<std::ptrdiff_t>(chunks * size), pool.end()));
  return next;
}

std::size_t PartitionResult::irregular_count() const {
  return static_cast<std::size_t>(std::count_if(statuses.begin(), statuses.end(),
                                                [](const PairStatus& s) { return !s.is_regular(); }));
}

PartitionResult find_regular_partition(const Graph& g, const PartitionConfig& config,
                                       const IterationObserver& observer) {
  config.validate();
  if (g.size() == 0) throw PreconditionError("find_regular_partition: empty graph");
  const Graph binary = g.is_binary() ? g : binarize(g, config.binarize_threshold);

  struct Iterate {
    EquitablePartition partition;
    std::vector<PairStatus> statuses;
    double fraction = 0.0;
  };
  std::optional<Iterate> best;

  PartitionResult result;
  result.within_check_lemma_range = config.within_check_lemma_range();

  auto finish = [&](EquitablePartition partition, std::vector<PairStatus> statuses) {
    result.densities = class_densities(g, partition);
    result.intra_densities = intra_class_densities(g, partition);
    result.partition = std::move(partition);
    result.statuses = std::move(statuses);
    return std::move(result);
  };

  EquitablePartition current = initial_partition(g, config.initial_classes, config.seed);
  double stall_best = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    auto statuses = check_all_pairs(binary, current, config.epsilon);
    if (observer) observer(binary, current, statuses);

    const std::size_t k = current.class_count();
    const auto irregular = static_cast<std::size_t>(std::count_if(
        statuses.begin(), statuses.end(), [](const PairStatus& s) { return !s.is_regular(); }));
    result.trace.push_back({it, k, current.class_size(), irregular, current.exceptional.size()});

    const double pairs = static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
    const double fraction = pairs > 0 ? static_cast<double>(irregular) / pairs : 0.0;
    if (static_cast<double>(irregular) <= config.epsilon * pairs) {
      result.converged = true;
      return finish(std::move(current), std::move(statuses));
    }
    if (!best || fraction < best->fraction) best = Iterate{current, statuses, fraction};
    if (it + 1 == config.max_iterations) {
      result.diagnostic = "iteration budget exhausted";
      break;
    }

    if (fraction < stall_best) {
      stall_best = fraction;
      stalled = 0;
    } else {
      ++stalled;
    }
    RefineMode mode = RefineMode::regroup;
    if (stalled >= config.stall_patience) {
      mode = RefineMode::split;
      stalled = 0;
      stall_best = std::numeric_limits<double>::infinity();
    }
    try {
      current = refine(binary, current, statuses, config, mode, it + 1);
    } catch (const PartitionFailure& failure) {
      result.diagnostic = failure.what();
      break;
    }
  }
  return finish(std::move(best->partition), std::move(best->statuses));
}

}  // namespace sze
