#include "qdisc/tensor.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qdisc {

SpaceStructure::SpaceStructure(std::initializer_list<Subsystem> systems) : systems_(systems) { validate(); }

SpaceStructure::SpaceStructure(std::vector<Subsystem> systems) : systems_(std::move(systems)) { validate(); }

void SpaceStructure::validate() const {
  std::set<std::string> seen;
  for (const auto& s : systems_) {
    if (s.dim == 0) throw std::invalid_argument("SpaceStructure: zero-dimensional subsystem '" + s.label + "'");
    if (!seen.insert(s.label).second) throw std::invalid_argument("SpaceStructure: duplicate label '" + s.label + "'");
  }
}

std::size_t SpaceStructure::total_dim() const {
  std::size_t d = 1;
  for (const auto& s : systems_) d *= s.dim;
  return d;
}

bool SpaceStructure::contains(const std::string& label) const {
  return std::any_of(systems_.begin(), systems_.end(), [&](const Subsystem& s) { return s.label == label; });
}

std::size_t SpaceStructure::position(const std::string& label) const {
  for (std::size_t k = 0; k < systems_.size(); ++k)
    if (systems_[k].label == label) return k;
  throw std::invalid_argument("SpaceStructure: unknown label '" + label + "'");
}

std::size_t SpaceStructure::dim(const std::string& label) const { return systems_[position(label)].dim; }

std::vector<std::string> SpaceStructure::labels() const {
  std::vector<std::string> out;
  out.reserve(systems_.size());
  for (const auto& s : systems_) out.push_back(s.label);
  return out;
}

std::size_t SpaceStructure::dim_of(const std::vector<std::string>& labels) const {
  std::size_t d = 1;
  for (const auto& l : labels) d *= dim(l);
  return d;
}

template <class T>
LabeledMatrix<T>::LabeledMatrix(SpaceStructure s, DenseMatrix<T> m) : space(std::move(s)), entries(std::move(m)) {
  const std::size_t d = space.total_dim();
  if (entries.rows() != d || entries.cols() != d) {
    throw std::invalid_argument("LabeledMatrix: entries do not match the space dimension");
  }
}

namespace {

std::vector<std::size_t> dims_of(const SpaceStructure& s) {
  std::vector<std::size_t> out;
  for (const auto& sys : s.systems()) out.push_back(sys.dim);
  return out;
}

// Split every index of `space` into (index over kept systems, index over the
// selected systems), both in the original relative order.
struct IndexSplit {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> selected;
  std::size_t kept_dim = 1;
  std::size_t selected_dim = 1;
  std::vector<Subsystem> kept_systems;
};

IndexSplit split_indices(const SpaceStructure& space, const std::vector<std::string>& labels) {
  std::vector<bool> is_selected(space.size(), false);
  for (const auto& l : labels) {
    std::size_t p = space.position(l);
    if (is_selected[p]) throw std::invalid_argument("duplicate label '" + l + "' in subsystem list");
    is_selected[p] = true;
  }
  IndexSplit out;
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (is_selected[k]) {
      out.selected_dim *= space.systems()[k].dim;
    } else {
      out.kept_dim *= space.systems()[k].dim;
      out.kept_systems.push_back(space.systems()[k]);
    }
  }
  const auto dims = dims_of(space);
  const std::size_t total = space.total_dim();
  out.kept.resize(total);
  out.selected.resize(total);
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t x = 0; x < total; ++x) {
    std::size_t kept = 0;
    std::size_t sel = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (is_selected[k]) {
        sel = sel * dims[k] + digit[k];
      } else {
        kept = kept * dims[k] + digit[k];
      }
    }
    out.kept[x] = kept;
    out.selected[x] = sel;
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++digit[k] < dims[k]) break;
      digit[k] = 0;
    }
  }
  return out;
}

bool is_identity(const DenseMatrix<cplx>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j) - (i == j ? cplx(1) : cplx(0))) > 1e-10) return false;
  return true;
}

bool is_identity(const DenseMatrix<ExactComplex>& m) { return m == DenseMatrix<ExactComplex>::identity(m.rows()); }

}  // namespace

template <class T>
DenseMatrix<T> kron(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  DenseMatrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T& aij = a(i, j);
      if (aij == T(0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

template <class T>
LabeledMatrix<T> kron(const LabeledMatrix<T>& a, const LabeledMatrix<T>& b) {
  std::vector<Subsystem> systems = a.space.systems();
  for (const auto& s : b.space.systems()) {
    if (a.space.contains(s.label)) throw std::invalid_argument("kron: label collision on '" + s.label + "'");
    systems.push_back(s);
  }
  return LabeledMatrix<T>(SpaceStructure(std::move(systems)), kron(a.entries, b.entries));
}

template <class T>
LabeledMatrix<T> partial_trace(const LabeledMatrix<T>& a, const std::vector<std::string>& labels) {
  const IndexSplit split = split_indices(a.space, labels);
  DenseMatrix<T> out(split.kept_dim, split.kept_dim);
  const std::size_t n = a.dim();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (split.selected[x] != split.selected[y]) continue;
      out(split.kept[x], split.kept[y]) += a.entries(x, y);
    }
  return LabeledMatrix<T>(SpaceStructure(split.kept_systems), std::move(out));
}

template <class T>
LabeledMatrix<T> trace_and_replace(const LabeledMatrix<T>& a, const std::vector<std::string>& labels) {
  if (labels.empty()) return a;
  const IndexSplit split = split_indices(a.space, labels);
  DenseMatrix<T> reduced(split.kept_dim, split.kept_dim);
  const std::size_t n = a.dim();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (split.selected[x] != split.selected[y]) continue;
      reduced(split.kept[x], split.kept[y]) += a.entries(x, y);
    }
  const T inv_dim = T(1) / T(static_cast<int>(split.selected_dim));
  for (auto& v : reduced.data()) v *= inv_dim;
  DenseMatrix<T> out(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (split.selected[x] != split.selected[y]) continue;
      out(x, y) = reduced(split.kept[x], split.kept[y]);
    }
  return LabeledMatrix<T>(a.space, std::move(out));
}

template <class T>
LabeledMatrix<T> link_product(const LabeledMatrix<T>& a, const LabeledMatrix<T>& b) {
  std::vector<std::string> shared;
  for (const auto& s : a.space.systems()) {
    if (!b.space.contains(s.label)) continue;
    if (b.space.dim(s.label) != s.dim) {
      throw std::invalid_argument("link_product: dimension mismatch on shared label '" + s.label + "'");
    }
    shared.push_back(s.label);
  }
  const IndexSplit sa = split_indices(a.space, shared);
  const IndexSplit sb = split_indices(b.space, shared);

  // B's shared index must follow A's order of the shared labels.
  std::vector<std::size_t> b_shared_remap(b.dim());
  {
    std::vector<std::string> b_order;
    for (const auto& s : b.space.systems())
      if (a.space.contains(s.label)) b_order.push_back(s.label);
    const auto dims_b = dims_of(b.space);
    std::vector<std::size_t> digit(dims_b.size(), 0);
    for (std::size_t x = 0; x < b.dim(); ++x) {
      std::size_t idx = 0;
      for (const auto& l : shared) {
        std::size_t p = b.space.position(l);
        idx = idx * dims_b[p] + digit[p];
      }
      b_shared_remap[x] = idx;
      for (std::size_t k = dims_b.size(); k-- > 0;) {
        if (++digit[k] < dims_b[k]) break;
        digit[k] = 0;
      }
    }
  }

  const std::size_t ds = sa.selected_dim;
  std::vector<std::size_t> a_index(sa.kept_dim * ds);
  for (std::size_t x = 0; x < a.dim(); ++x) a_index[sa.kept[x] * ds + sa.selected[x]] = x;
  std::vector<std::size_t> b_index(ds * sb.kept_dim);
  for (std::size_t x = 0; x < b.dim(); ++x) b_index[b_shared_remap[x] * sb.kept_dim + sb.kept[x]] = x;

  std::vector<Subsystem> systems = sa.kept_systems;
  for (const auto& s : sb.kept_systems) {
    if (a.space.contains(s.label)) throw std::invalid_argument("link_product: label collision");
    systems.push_back(s);
  }
  const std::size_t da = sa.kept_dim;
  const std::size_t db = sb.kept_dim;
  DenseMatrix<T> out(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t ip = 0; ip < da; ++ip)
      for (std::size_t t = 0; t < ds; ++t)
        for (std::size_t s = 0; s < ds; ++s) {
          const T& av = a.entries(a_index[i * ds + t], a_index[ip * ds + s]);
          if (av == T(0)) continue;
          for (std::size_t j = 0; j < db; ++j)
            for (std::size_t jp = 0; jp < db; ++jp) {
              const T& bv = b.entries(b_index[t * db + j], b_index[s * db + jp]);
              if (bv == T(0)) continue;
              out(i * db + j, ip * db + jp) += av * bv;
            }
        }
  return LabeledMatrix<T>(SpaceStructure(std::move(systems)), std::move(out));
}

template <class T>
LabeledMatrix<T> permute_systems(const LabeledMatrix<T>& a, const std::vector<std::string>& new_order) {
  if (new_order.size() != a.space.size()) throw std::invalid_argument("permute_systems: not a permutation");
  std::vector<std::size_t> perm;  // new position -> old position
  std::vector<bool> used(a.space.size(), false);
  std::vector<Subsystem> systems;
  for (const auto& l : new_order) {
    if (!a.space.contains(l)) throw std::invalid_argument("permute_systems: unknown label '" + l + "'");
    std::size_t p = a.space.position(l);
    if (used[p]) throw std::invalid_argument("permute_systems: repeated label '" + l + "'");
    used[p] = true;
    perm.push_back(p);
    systems.push_back(a.space.systems()[p]);
  }
  const auto dims = dims_of(a.space);
  const std::size_t n = a.dim();
  std::vector<std::size_t> new_index(n);
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) idx = idx * dims[perm[k]] + digit[perm[k]];
    new_index[x] = idx;
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++digit[k] < dims[k]) break;
      digit[k] = 0;
    }
  }
  DenseMatrix<T> out(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) out(new_index[x], new_index[y]) = a.entries(x, y);
  return LabeledMatrix<T>(SpaceStructure(std::move(systems)), std::move(out));
}

template <class T>
LabeledMatrix<T> relabel(const LabeledMatrix<T>& a, const std::vector<std::string>& new_labels) {
  if (new_labels.size() != a.space.size()) throw std::invalid_argument("relabel: label count mismatch");
  std::vector<Subsystem> systems = a.space.systems();
  for (std::size_t k = 0; k < systems.size(); ++k) systems[k].label = new_labels[k];
  return LabeledMatrix<T>(SpaceStructure(std::move(systems)), a.entries);
}

template <class T>
LabeledMatrix<T> choi_from_kraus(const std::vector<DenseMatrix<T>>& kraus, std::size_t d_in, std::size_t d_out,
                                 const std::string& in_label, const std::string& out_label) {
  if (kraus.empty()) throw std::invalid_argument("choi_from_kraus: empty Kraus set");
  DenseMatrix<T> completeness(d_in, d_in);
  for (const auto& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in) throw std::invalid_argument("choi_from_kraus: Kraus shape mismatch");
    completeness += k.adjoint() * k;
  }
  if (!is_identity(completeness)) throw std::invalid_argument("choi_from_kraus: Kraus set is not trace preserving");

  const std::size_t n = d_in * d_out;
  DenseMatrix<T> c(n, n);
  for (const auto& k : kraus)
    for (std::size_t i = 0; i < d_in; ++i)
      for (std::size_t j = 0; j < d_in; ++j)
        for (std::size_t o = 0; o < d_out; ++o) {
          if (k(o, i) == T(0)) continue;
          for (std::size_t op = 0; op < d_out; ++op) c(i * d_out + o, j * d_out + op) += k(o, i) * conj_scalar(k(op, j));
        }
  return LabeledMatrix<T>(SpaceStructure{{in_label, d_in}, {out_label, d_out}}, std::move(c));
}

#define QDISC_INSTANTIATE_TENSOR(T)                                                                             \
  template struct LabeledMatrix<T>;                                                                             \
  template DenseMatrix<T> kron(const DenseMatrix<T>&, const DenseMatrix<T>&);                                   \
  template LabeledMatrix<T> kron(const LabeledMatrix<T>&, const LabeledMatrix<T>&);                             \
  template LabeledMatrix<T> partial_trace(const LabeledMatrix<T>&, const std::vector<std::string>&);            \
  template LabeledMatrix<T> trace_and_replace(const LabeledMatrix<T>&, const std::vector<std::string>&);        \
  template LabeledMatrix<T> link_product(const LabeledMatrix<T>&, const LabeledMatrix<T>&);                     \
  template LabeledMatrix<T> permute_systems(const LabeledMatrix<T>&, const std::vector<std::string>&);          \
  template LabeledMatrix<T> relabel(const LabeledMatrix<T>&, const std::vector<std::string>&);                  \
  template LabeledMatrix<T> choi_from_kraus(const std::vector<DenseMatrix<T>>&, std::size_t, std::size_t,       \
                                            const std::string&, const std::string&);

QDISC_INSTANTIATE_TENSOR(cplx)
QDISC_INSTANTIATE_TENSOR(ExactComplex)

#undef QDISC_INSTANTIATE_TENSOR

}  // namespace qdisc
