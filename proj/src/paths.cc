#include "skein/paths.hpp"

namespace skein {

std::vector<Walk> walks_from_star(int N, int length) {
  if (N < 2) throw std::invalid_argument("walks_from_star: N < 2");
  if (length < 0) throw std::invalid_argument("walks_from_star: negative length");
  std::vector<Walk> cur{Walk{1}};
  for (int step = 0; step < length; ++step) {
    std::vector<Walk> next;
    next.reserve(cur.size() * 2);
    for (const Walk& w : cur) {
      int v = w.back();
      for (int u : {v - 1, v + 1}) {
        if (u < 1 || u > N - 1) continue;
        Walk e = w;
        e.push_back(static_cast<uint8_t>(u));
        next.push_back(std::move(e));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::vector<long> walk_counts(int N, int length) {
  std::vector<long> cnt(N, 0);
  cnt[1] = 1;
  for (int step = 0; step < length; ++step) {
    std::vector<long> nxt(N, 0);
    for (int v = 1; v <= N - 1; ++v) {
      if (!cnt[v]) continue;
      if (v - 1 >= 1) nxt[v - 1] += cnt[v];
      if (v + 1 <= N - 1) nxt[v + 1] += cnt[v];
    }
    cnt = std::move(nxt);
  }
  return cnt;
}

long quotient_dim(int N, int n) {
  auto cnt = walk_counts(N, n);
  long d = 0;
  for (int v = 1; v <= N - 1; ++v) d += cnt[v] * cnt[v];
  return d;
}

PathEngine<Scalar> make_path_engine(const FieldPtr& field) {
  PathEngine<Scalar> e;
  e.N = field->N();
  Scalar delta = make_delta(e.N);
  e.mu.assign(e.N, Scalar::zero(field));
  for (int v = 1; v <= e.N - 1; ++v) e.mu[v] = quantum_integer(v, delta);
  e.cup_down.assign(e.N, Scalar::zero(field));
  e.cap_up.assign(e.N, Scalar::zero(field));
  for (int y = 2; y <= e.N - 1; ++y) e.cup_down[y] = e.mu[y - 1] / e.mu[y];
  for (int y = 1; y <= e.N - 2; ++y) e.cap_up[y] = e.mu[y + 1] / e.mu[y];
  e.one = Scalar::one(field);
  e.delta = delta;
  e.delta_inv = delta.inverse();
  return e;
}

PathEngine<double> make_path_engine_double(int N) {
  PathEngine<double> e;
  e.N = N;
  double delta = 2.0 * std::cos(M_PI / N);
  auto qint = [&](int v) {
    double q = M_PI / N;
    return std::sin(v * q) / std::sin(q);
  };
  e.mu.assign(N, 0.0);
  for (int v = 1; v <= N - 1; ++v) e.mu[v] = qint(v);
  e.cup_down.assign(N, 0.0);
  e.cap_up.assign(N, 0.0);
  for (int y = 2; y <= N - 1; ++y) e.cup_down[y] = e.mu[y - 1] / e.mu[y];
  for (int y = 1; y <= N - 2; ++y) e.cap_up[y] = e.mu[y + 1] / e.mu[y];
  e.one = 1.0;
  e.delta = delta;
  e.delta_inv = 1.0 / delta;
  return e;
}

}  // namespace skein
