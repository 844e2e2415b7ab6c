#pragma once

// 50-digit reference implementations used only by the tests. Each follows the
// defining formula directly and shares no code with the library.

#include <algorithm>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

inline Big factorial(int n) {
  Big f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline Big binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  Big r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline Big pow_int(const Big& x, int e) {
  Big r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

inline double log_factorial(int n) {
  return static_cast<double>(boost::multiprecision::log(factorial(n)));
}

// L_n^k(x) = sum_{i=0}^{n} C(n+k, n-i) (-x)^i / i!
inline Big laguerre(int n, int k, const Big& x) {
  Big sum = 0;
  for (int i = 0; i <= n; ++i) {
    sum += binomial(n + k, n - i) * pow_int(-x, i) / factorial(i);
  }
  return sum;
}

// 1F1(a; b; x) = sum_i (a)_i x^i / ((b)_i i!)
inline Big kummer(int a, int b, const Big& x) {
  Big term = 1;
  Big sum = 1;
  for (int i = 0; i < 100000; ++i) {
    term = term * (a + i) * x / ((b + i) * Big(i + 1));
    sum += term;
    if (term < sum * Big("1e-45")) break;
  }
  return sum;
}

// P(m | n) as binomial loss followed by independent Poisson noise counts:
// sum_k C(n,k) eta^k (1-eta)^(n-k) * e^-N N^(m-k) / (m-k)!
inline Big response_convolution(double eta_d, double noise_d, int m, int n) {
  const Big eta = eta_d;
  const Big noise = noise_d;
  Big sum = 0;
  for (int k = 0; k <= std::min(n, m); ++k) {
    const Big loss = binomial(n, k) * pow_int(eta, k) * pow_int(1 - eta, n - k);
    const Big poisson = boost::multiprecision::exp(-noise) * pow_int(noise, m - k) / factorial(m - k);
    sum += loss * poisson;
  }
  return sum;
}

// Closed-form inverse entries with 50-digit arithmetic.
inline Big inverse_closed_form(double eta_d, double noise_d, int n, int m) {
  const Big eta = eta_d;
  const Big noise = noise_d;
  const Big x = noise * (1 - eta) / eta;
  const Big en = boost::multiprecision::exp(noise);
  if (m <= n) {
    const int gap = n - m;
    return kummer(n + 1, gap + 1, x) * en * pow_int(-noise, gap) / factorial(gap) /
           pow_int(eta, n);
  }
  const int gap = m - n;
  return en * kummer(m + 1, gap + 1, x) * binomial(m, n) / pow_int(eta, n) *
         pow_int(1 - 1 / eta, gap);
}

}  // namespace oracle
