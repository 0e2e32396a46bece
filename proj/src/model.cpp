#include "v2dm/model.hpp"

#include "v2dm/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace v2dm {

Hamiltonian::Hamiltonian(int M_, std::string label_)
    : M(M_), label(std::move(label_)) {
  if (M < 2) throw std::invalid_argument("Hamiltonian: need at least two orbitals");
  const int d2 = M * (M - 1) / 2;
  t = Mat::Zero(M, M);
  V = Mat::Zero(d2, d2);
}

void Hamiltonian::add_one_body(int a, int b, double v) {
  if (a < 0 || b < 0 || a >= M || b >= M)
    throw std::out_of_range("add_one_body: orbital out of range");
  t(a, b) += v;
}

void Hamiltonian::add_two_body(int a, int b, int c, int d, double v) {
  PairBasis pb(M);
  auto [p, sp] = pair_index(pb, a, b);
  auto [q, sq] = pair_index(pb, c, d);
  V(p, q) += sp * sq * v;
}

Mat reduced_hamiltonian(const Hamiltonian& H, int N) {
  if (N < 2) throw std::invalid_argument("reduced_hamiltonian: need N >= 2");
  PairBasis pb(H.M);
  return pair_embed(H.t, pb) / (N - 1) + H.V;
}

Hamiltonian hubbard_1d(int L, double t, double U) {
  if (L < 2) throw std::invalid_argument("hubbard_1d: need at least two sites");
  Hamiltonian H(2 * L, "hubbard");
  for (int i = 0; i < L; ++i) {
    const int j = (i + 1) % L;
    for (int s = 0; s < 2; ++s) {
      H.add_one_body(2 * i + s, 2 * j + s, -t);
      H.add_one_body(2 * j + s, 2 * i + s, -t);
    }
    H.add_two_body(2 * i, 2 * i + 1, 2 * i, 2 * i + 1, U);
  }
  return H;
}

Hamiltonian pairing_hamiltonian(const Vec& eps, double g, const Vec& x) {
  const int levels = static_cast<int>(eps.size());
  if (x.size() != levels)
    throw std::invalid_argument("pairing_hamiltonian: eps/x size mismatch");
  Hamiltonian H(2 * levels, "pairing");
  Vec xo(2 * levels);
  for (int k = 0; k < levels; ++k) {
    H.add_one_body(2 * k, 2 * k, eps[k]);
    H.add_one_body(2 * k + 1, 2 * k + 1, eps[k]);
    xo[2 * k] = x[k];
    xo[2 * k + 1] = -x[k];
  }
  for (int a = 0; a < 2 * levels; ++a)
    for (int b = 0; b < 2 * levels; ++b)
      H.add_two_body(a, a ^ 1, b, b ^ 1, -0.5 * g * xo[a] * xo[b]);
  return H;
}

void save_problem(const std::string& path, const Hamiltonian& H, int N) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_problem: cannot open " + path);
  out << "# one- and two-body coefficients, antisymmetrized elements\n";
  out << H.M << " " << N << "\n";
  char buf[64];
  for (int a = 0; a < H.M; ++a)
    for (int b = a; b < H.M; ++b)
      if (H.t(a, b) != 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", H.t(a, b));
        out << "1B " << a << " " << b << " " << buf << "\n";
      }
  PairBasis pb(H.M);
  for (int p = 0; p < pb.size(); ++p)
    for (int q = p; q < pb.size(); ++q)
      if (H.V(p, q) != 0.0) {
        const auto& [a, b] = pb.pair(p);
        const auto& [c, d] = pb.pair(q);
        std::snprintf(buf, sizeof buf, "%.17g", H.V(p, q));
        out << "2B " << a << " " << b << " " << c << " " << d << " " << buf << "\n";
      }
}

std::pair<Hamiltonian, int> load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_problem: cannot open " + path);
  std::string line;
  int M = 0, N = 0;
  bool have_header = false;
  auto strip = [](std::string s) {
    const auto h = s.find('#');
    if (h != std::string::npos) s.erase(h);
    return s;
  };
  while (std::getline(in, line)) {
    line = strip(line);
    std::istringstream ls(line);
    if (!have_header) {
      if (ls >> M >> N) have_header = true;
      continue;
    }
    break;
  }
  if (!have_header) throw std::runtime_error("load_problem: missing header");
  Hamiltonian H(M, "file");
  PairBasis pb(M);
  auto handle = [&](const std::string& l) {
    std::istringstream ls(l);
    std::string tag;
    if (!(ls >> tag)) return;
    if (tag == "1B") {
      int a, b;
      double v;
      if (!(ls >> a >> b >> v)) throw std::runtime_error("load_problem: bad 1B line");
      H.add_one_body(a, b, v);
      if (a != b) H.add_one_body(b, a, v);
    } else if (tag == "2B") {
      int a, b, c, d;
      double v;
      if (!(ls >> a >> b >> c >> d >> v)) throw std::runtime_error("load_problem: bad 2B line");
      if (a >= b || c >= d) throw std::runtime_error("load_problem: 2B indices must be ordered");
      const int p = pb.slot(a, b), q = pb.slot(c, d);
      H.V(p, q) += v;
      if (p != q) H.V(q, p) += v;
    } else {
      throw std::runtime_error("load_problem: unknown tag '" + tag + "'");
    }
  };
  handle(line);
  while (std::getline(in, line)) handle(strip(line));
  return {H, N};
}

void save_two_body(const std::string& path, const Mat& A, int M, int N) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_two_body: cannot open " + path);
  const int d2 = static_cast<int>(A.rows());
  out << M << " " << N << " " << d2 << "\n";
  char buf[64];
  for (int i = 0; i < d2; ++i) {
    for (int j = 0; j < d2; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      out << buf << (j + 1 == d2 ? "\n" : " ");
    }
  }
}

SubsystemSpec make_subsystem_spec(const Hamiltonian& H, const std::vector<int>& orbitals) {
  SubsystemSpec spec;
  spec.orbitals = orbitals;
  spec.M = H.M;
  std::vector<char> in(H.M, 0);
  for (int o : orbitals) {
    if (o < 0 || o >= H.M) throw std::out_of_range("make_subsystem_spec: orbital out of range");
    if (in[o]) throw std::invalid_argument("make_subsystem_spec: duplicate orbital");
    in[o] = 1;
  }
  spec.tV = Mat::Zero(H.M, H.M);
  for (int a = 0; a < H.M; ++a)
    for (int b = 0; b < H.M; ++b)
      if (in[a] && in[b]) spec.tV(a, b) = H.t(a, b);
  PairBasis pb(H.M);
  spec.VV = Mat::Zero(pb.size(), pb.size());
  for (int p = 0; p < pb.size(); ++p) {
    const auto& [a, b] = pb.pair(p);
    if (!in[a] || !in[b]) continue;
    for (int q = 0; q < pb.size(); ++q) {
      const auto& [c, d] = pb.pair(q);
      if (in[c] && in[d]) spec.VV(p, q) = H.V(p, q);
    }
  }
  return spec;
}

Hamiltonian restrict_to(const Hamiltonian& H, const std::vector<int>& orbitals) {
  const int k = static_cast<int>(orbitals.size());
  for (size_t i = 0; i + 1 < orbitals.size(); ++i)
    if (orbitals[i + 1] <= orbitals[i])
      throw std::invalid_argument("restrict_to: orbitals must be ascending");
  Hamiltonian sub(k, H.label + "-fragment");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub.t(i, j) = H.t(orbitals[i], orbitals[j]);
  PairBasis pb(H.M), pbs(k);
  for (int p = 0; p < pbs.size(); ++p) {
    const auto& [i, j] = pbs.pair(p);
    for (int q = 0; q < pbs.size(); ++q) {
      const auto& [l, m] = pbs.pair(q);
      sub.V(p, q) = H.V(pb.slot(orbitals[i], orbitals[j]), pb.slot(orbitals[l], orbitals[m]));
    }
  }
  return sub;
}

std::vector<LinearInequality> subsystem_inequalities(const SubsystemSpec& spec, int N_total) {
  if (spec.table.size() < 2)
    throw std::invalid_argument("subsystem_inequalities: need at least two table points");
  for (size_t i = 0; i + 1 < spec.table.size(); ++i)
    if (spec.table[i + 1].first <= spec.table[i].first)
      throw std::invalid_argument("subsystem_inequalities: table not increasing in N");
  for (size_t i = 1; i + 1 < spec.table.size(); ++i) {
    const auto& [nl, el] = spec.table[i - 1];
    const auto& [nm, em] = spec.table[i];
    const auto& [nr, er] = spec.table[i + 1];
    const double chord = el + (er - el) * (double(nm - nl) / double(nr - nl));
    if (em > chord + 1e-9 * (1.0 + std::abs(chord)))
      throw std::invalid_argument("subsystem_inequalities: table is not convex");
  }
  PairBasis pb(spec.M);
  Mat pv = Mat::Zero(spec.M, spec.M);
  for (int o : spec.orbitals) pv(o, o) = 1.0;
  std::vector<LinearInequality> out;
  for (size_t i = 0; i + 1 < spec.table.size(); ++i) {
    const double n0 = spec.table[i].first, e0 = spec.table[i].second;
    const double n1 = spec.table[i + 1].first, e1 = spec.table[i + 1].second;
    const double a = (e1 - e0) / (n1 - n0);
    const double b = e0 - a * n0;
    LinearInequality iq;
    iq.C = pair_embed(spec.tV - a * pv, pb) / (N_total - 1) + spec.VV;
    iq.c = b;
    out.push_back(std::move(iq));
  }
  return out;
}

}  // namespace v2dm
