#include "bggm/model.hpp"

#include "bggm/error.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace bggm {

using detail::json;

std::string_view to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::class1: return "class1";
    case ClassLabel::class2: return "class2";
    case ClassLabel::unknown: return "unknown";
  }
  return "unknown";
}

std::vector<Index> Dataset::rows_with(ClassLabel c) const {
  std::vector<Index> out;
  for (Index i = 0; i < static_cast<Index>(labels.size()); ++i)
    if (labels[i] == c) out.push_back(i);
  return out;
}

void Dataset::validate(bool for_fit) const {
  if (p() < 2) throw ValidationError("dataset needs at least 2 proteins");
  if (static_cast<Index>(labels.size()) != n()) throw ValidationError("dataset: one label per row required");
  if (static_cast<Index>(names.size()) != p()) throw ValidationError("dataset: one name per column required");
  std::set<std::string> seen;
  for (const auto& nm : names)
    if (!seen.insert(nm).second) throw ValidationError("dataset: duplicate protein name '" + nm + "'");
  if (!y.allFinite()) throw ValidationError("dataset contains non-finite values");
  if (for_fit) {
    if (n() < 2) throw ValidationError("dataset needs at least 2 samples");
    if (rows_with(ClassLabel::class1).empty() || rows_with(ClassLabel::class2).empty()) {
      throw ValidationError("dataset needs labeled samples from both classes");
    }
  }
}

void Hyperparameters::validate() const {
  const Index d = p();
  auto positive = [&](const Matrix& m, const char* what) {
    if (m.rows() != d || m.cols() != d) throw ValidationError(std::string(what) + ": wrong shape");
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (i != j && !(m(i, j) > 0.0 && std::isfinite(m(i, j))))
          throw ValidationError(std::string(what) + ": parameters must be positive");
  };
  for (std::size_t k = 0; k < 2; ++k) {
    positive(edge_a[k], "edge prior a");
    positive(edge_b[k], "edge prior b");
    if (mu0[k].size() != d) throw ValidationError("mu0: wrong length");
    if (b0[k].rows() != d || b0[k].cols() != d) throw ValidationError("b0: wrong shape");
    if (!is_positive_definite(b0[k])) throw ValidationError("b0 must be positive definite");
  }
  positive(diff_e, "differential prior e");
  positive(diff_f, "differential prior f");
  if (!(s_shape > 0.0 && s_scale > 0.0)) throw ValidationError("inverse-gamma parameters must be positive");
  if (!(label_eta > 0.0 && label_zeta > 0.0)) throw ValidationError("label prior parameters must be positive");
}

Hyperparameters default_hyperparameters(Index p) {
  if (p < 2) throw ValidationError("default_hyperparameters: p must be at least 2");
  Hyperparameters h;
  const Matrix two = Matrix::Constant(p, p, 2.0);
  h.edge_a = {two, two};
  h.edge_b = {two, two};
  h.diff_e = two;
  h.diff_f = two;
  h.mu0 = {Vector::Zero(p), Vector::Zero(p)};
  h.b0 = {1e-2 * Matrix::Identity(p, p), 1e-2 * Matrix::Identity(p, p)};
  return h;
}

void PriorNetwork::validate(const std::vector<std::string>& names) const {
  std::unordered_map<std::string, Index> index;
  for (Index i = 0; i < static_cast<Index>(names.size()); ++i) index.emplace(names[i], i);
  std::set<std::pair<Index, Index>> pairs;
  for (const auto& e : edges) {
    const auto a = index.find(e.protein_i);
    const auto b = index.find(e.protein_j);
    if (a == index.end()) throw ValidationError("prior network: unknown protein '" + e.protein_i + "'");
    if (b == index.end()) throw ValidationError("prior network: unknown protein '" + e.protein_j + "'");
    if (a->second == b->second) throw ValidationError("prior network: self-edge on '" + e.protein_i + "'");
    const auto key = std::minmax(a->second, b->second);
    if (!pairs.insert(key).second) {
      throw ValidationError("prior network: duplicate edge " + e.protein_i + " -- " + e.protein_j);
    }
  }
}

Hyperparameters apply_prior_network(Hyperparameters h, const PriorNetwork& net,
                                    const std::vector<std::string>& names) {
  net.validate(names);
  std::unordered_map<std::string, Index> index;
  for (Index i = 0; i < static_cast<Index>(names.size()); ++i) index.emplace(names[i], i);
  for (const auto& e : net.edges) {
    const Index i = index.at(e.protein_i);
    const Index j = index.at(e.protein_j);
    double a = 2.0, b = 2.0;
    if (e.evidence == Evidence::important) {
      a = 10.0;
      b = 2.0;
    } else if (e.evidence == Evidence::unimportant) {
      a = 2.0;
      b = 10.0;
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const bool hit = e.scope == EdgeScope::both || (k == 0 && e.scope == EdgeScope::class1) ||
                       (k == 1 && e.scope == EdgeScope::class2);
      if (!hit) continue;
      h.edge_a[k](i, j) = h.edge_a[k](j, i) = a;
      h.edge_b[k](i, j) = h.edge_b[k](j, i) = b;
    }
  }
  return h;
}

std::vector<Violation> validate_state(const ChainState& st) {
  std::vector<Violation> out;
  const Index p = st.p();
  auto add = [&](std::string code, std::string detail) { out.push_back({std::move(code), std::move(detail)}); };
  auto where = [](std::size_t k, Index i, Index j) {
    return "class" + std::to_string(k + 1) + " (" + std::to_string(i) + "," + std::to_string(j) + ")";
  };

  for (std::size_t k = 0; k < 2; ++k) {
    const ClassState& c = st.cls[k];
    if (c.a.rows() != p || c.a.cols() != p || c.r.rows() != p || c.r.cols() != p || c.s.size() != p ||
        c.mu.size() != p || c.q.rows() != p || c.q.cols() != p) {
      add("shape", "class" + std::to_string(k + 1) + " parameter dimensions disagree");
      return out;
    }
    for (Index i = 0; i < p; ++i) {
      if (!(c.s[i] > 0.0) || !std::isfinite(c.s[i])) add("s-positive", where(k, i, i));
      if (!std::isfinite(c.mu[i])) add("mu-finite", where(k, i, i));
      if (c.a(i, i) != 1.0 || c.r(i, i) != 1.0) add("unit-diagonal", where(k, i, i));
      for (Index j = i + 1; j < p; ++j) {
        if (c.a(i, j) != c.a(j, i) || c.r(i, j) != c.r(j, i)) add("symmetry", where(k, i, j));
        if (c.a(i, j) != 0.0 && c.a(i, j) != 1.0) add("binary", where(k, i, j));
        if (!(c.r(i, j) >= -1.0 && c.r(i, j) <= 1.0)) add("r-range", where(k, i, j));
        if (!(c.q(i, j) > 0.0 && c.q(i, j) < 1.0)) add("q-range", where(k, i, j));
      }
    }
    if (c.a.allFinite() && c.r.allFinite() && !cholesky_log_det(hadamard(c.a, c.r))) {
      add("PD", "class" + std::to_string(k + 1) + " A .* R is not positive definite");
    }
  }
  if (st.pi.rows() != p || st.pi.cols() != p) {
    add("shape", "pi dimensions disagree");
    return out;
  }
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double x = (st.cls[0].a(i, j) != st.cls[1].a(i, j)) ? 1.0 : 0.0;
      if (st.lambda(i, j) != x || st.lambda(j, i) != x) {
        add("lambda-XOR", "(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (!(st.pi(i, j) > 0.0 && st.pi(i, j) < 1.0)) add("pi-range", "(" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  if (static_cast<std::size_t>(st.h.size()) != st.z_u.size()) {
    add("shape", "h and z_u lengths disagree");
  } else {
    for (std::size_t o = 0; o < st.z_u.size(); ++o) {
      if (!(st.h[o] > 0.0 && st.h[o] < 1.0)) add("h-range", "sample " + std::to_string(o));
      if (st.z_u[o] == ClassLabel::unknown) add("z-label", "sample " + std::to_string(o));
    }
  }
  return out;
}

std::string serialize_state(const ChainState& st) {
  json j;
  j["version"] = 1;
  json classes = json::array();
  for (const auto& c : st.cls) {
    classes.push_back({{"a", detail::to_json(c.a)},
                       {"r", detail::to_json(c.r)},
                       {"s", detail::to_json(c.s)},
                       {"mu", detail::to_json(c.mu)},
                       {"q", detail::to_json(c.q)}});
  }
  j["classes"] = std::move(classes);
  j["lambda"] = detail::to_json(st.lambda);
  j["pi"] = detail::to_json(st.pi);
  j["h"] = detail::to_json(st.h);
  json z = json::array();
  for (ClassLabel l : st.z_u) z.push_back(static_cast<int>(l));
  j["z_u"] = std::move(z);
  return j.dump();
}

ChainState deserialize_state(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != 1) throw ValidationError("chain state: unsupported version");
    ChainState st;
    for (std::size_t k = 0; k < 2; ++k) {
      const json& c = j.at("classes").at(k);
      st.cls[k].a = detail::matrix_from_json(c.at("a"));
      st.cls[k].r = detail::matrix_from_json(c.at("r"));
      st.cls[k].s = detail::vector_from_json(c.at("s"));
      st.cls[k].mu = detail::vector_from_json(c.at("mu"));
      st.cls[k].q = detail::matrix_from_json(c.at("q"));
    }
    st.lambda = detail::matrix_from_json(j.at("lambda"));
    st.pi = detail::matrix_from_json(j.at("pi"));
    st.h = detail::vector_from_json(j.at("h"));
    for (const auto& z : j.at("z_u")) {
      const int v = z.get<int>();
      if (v < 0 || v > 1) throw ValidationError("chain state: bad label code");
      st.z_u.push_back(static_cast<ClassLabel>(v));
    }
    return st;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("chain state: ") + e.what());
  }
}

}  // namespace bggm
