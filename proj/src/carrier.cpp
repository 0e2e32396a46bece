#include "v2dm/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace v2dm {

std::string cond_name(Cond c) {
  switch (c) {
    case Cond::I: return "I";
    case Cond::Q: return "Q";
    case Cond::G: return "G";
    case Cond::T1: return "T1";
    case Cond::T2: return "T2";
    case Cond::T2P: return "T2P";
    case Cond::GutzRho: return "GRHO";
    case Cond::GutzQ: return "GQ";
  }
  return "?";
}

ConditionSet::ConditionSet(std::vector<Cond> conds) : conds_(std::move(conds)) {
  if (std::find(conds_.begin(), conds_.end(), Cond::I) == conds_.end())
    conds_.insert(conds_.begin(), Cond::I);
  bool t2 = false, t2p = false;
  for (Cond c : conds_) {
    t2 |= c == Cond::T2;
    t2p |= c == Cond::T2P;
  }
  if (t2 && t2p)
    throw std::invalid_argument("ConditionSet: T2 and T2P are mutually exclusive");
  for (size_t i = 0; i < conds_.size(); ++i)
    for (size_t j = i + 1; j < conds_.size(); ++j)
      if (conds_[i] == conds_[j])
        throw std::invalid_argument("ConditionSet: duplicate condition");
}

ConditionSet ConditionSet::parse(const std::string& csv) {
  std::vector<Cond> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok == "I") out.push_back(Cond::I);
    else if (tok == "Q") out.push_back(Cond::Q);
    else if (tok == "G") out.push_back(Cond::G);
    else if (tok == "T1") out.push_back(Cond::T1);
    else if (tok == "T2") out.push_back(Cond::T2);
    else if (tok == "T2P") out.push_back(Cond::T2P);
    else if (tok == "GUTZ") {
      out.push_back(Cond::GutzRho);
      out.push_back(Cond::GutzQ);
    } else
      throw std::invalid_argument("ConditionSet: unknown condition '" + tok + "'");
  }
  return ConditionSet(out);
}

bool ConditionSet::has(Cond c) const {
  return std::find(conds_.begin(), conds_.end(), c) != conds_.end();
}

std::string ConditionSet::str() const {
  std::string s;
  for (Cond c : conds_) {
    if (!s.empty()) s += ',';
    s += cond_name(c);
  }
  return s;
}

int cond_block_dim(Cond c, const BasisDims& dims) {
  switch (c) {
    case Cond::I:
    case Cond::Q: return dims.d2;
    case Cond::G: return dims.dph;
    case Cond::T1: return dims.d3;
    case Cond::T2: return dims.dpph;
    case Cond::T2P: return dims.dpph + dims.M;
    case Cond::GutzRho:
    case Cond::GutzQ: return dims.M;
  }
  return 0;
}

Carrier Carrier::zero(const ConditionSet& cs, const BasisDims& dims, int m_ineq) {
  Carrier out;
  out.blocks.reserve(cs.conds().size());
  for (Cond c : cs.conds()) {
    const int d = cond_block_dim(c, dims);
    out.blocks.emplace_back(c, Mat::Zero(d, d));
  }
  out.ineq = Vec::Zero(m_ineq);
  return out;
}

int Carrier::total_dim() const {
  int n = static_cast<int>(ineq.size());
  for (const auto& [c, b] : blocks) n += static_cast<int>(b.rows());
  return n;
}

Carrier& Carrier::operator+=(const Carrier& o) {
  for (size_t k = 0; k < blocks.size(); ++k) blocks[k].second += o.blocks[k].second;
  ineq += o.ineq;
  return *this;
}

Carrier& Carrier::operator-=(const Carrier& o) {
  for (size_t k = 0; k < blocks.size(); ++k) blocks[k].second -= o.blocks[k].second;
  ineq -= o.ineq;
  return *this;
}

Carrier& Carrier::operator*=(double s) {
  for (auto& [c, b] : blocks) b *= s;
  ineq *= s;
  return *this;
}

double carrier_inner(const Carrier& A, const Carrier& B) {
  if (A.blocks.size() != B.blocks.size() || A.ineq.size() != B.ineq.size())
    throw std::invalid_argument("carrier_inner: block structure mismatch");
  double v = A.ineq.dot(B.ineq);
  for (size_t k = 0; k < A.blocks.size(); ++k) {
    if (A.blocks[k].first != B.blocks[k].first)
      throw std::invalid_argument("carrier_inner: block label mismatch");
    v += A.blocks[k].second.cwiseProduct(B.blocks[k].second).sum();
  }
  return v;
}

double carrier_trace(const Carrier& A) {
  double v = A.ineq.sum();
  for (const auto& [c, b] : A.blocks) v += b.trace();
  return v;
}

double carrier_norm(const Carrier& A) { return std::sqrt(carrier_inner(A, A)); }

}  // namespace v2dm
