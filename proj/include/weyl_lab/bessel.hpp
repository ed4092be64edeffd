#pragma once

#include <vector>

// Zeros of the Bessel functions J_n, bracketed by a scan finer than the
// minimal zero spacing (3.11 across all orders) and refined by bisection.
// Tables are certified against the interlacing law j_{n,k} < j_{n+1,k} < j_{n,k+1}.
namespace weyl_lab::bessel {

// k-th positive zero of J_order, k >= 1
double j_zero(int order, int k);

// all positive zeros of J_order up to x, ascending
std::vector<double> zeros_up_to(int order, double x);

// rows n = 0, 1, ... of zeros <= x, stopping at the first empty order;
// throws if any interlacing check fails
std::vector<std::vector<double>> zero_table(double x);

}  // namespace weyl_lab::bessel
