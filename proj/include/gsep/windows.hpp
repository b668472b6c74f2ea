#pragma once
#include <cmath>

// Frequency-domain window constructions shared by the wavelet, shearlet and
// multiscale banks. The 1-D profile Xi is 1 on [-1/16,1/16], supported in
// [-1/8,1/8], with a C^3 polynomial transition, so that
//   Theta^2(xi) + sum_j W_j^2(xi) telescopes to Theta^2(2^-2(J+1) xi).

namespace gsep::win {

// t^4 (35 - 84 t + 70 t^2 - 20 t^3), monotone 0 -> 1 with three vanishing
// derivatives at both ends; nu(t) + nu(1-t) = 1.
inline double meyer_nu(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    return t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

inline double xi_hat(double u) {
    u = std::abs(u);
    if (u <= 1.0 / 16.0) return 1.0;
    if (u >= 1.0 / 8.0) return 0.0;
    return std::cos(M_PI / 2.0 * meyer_nu(16.0 * u - 1.0));
}

inline double theta_hat(double u1, double u2) { return xi_hat(u1) * xi_hat(u2); }

// Corona window W(u) = sqrt(Theta^2(u/4) - Theta^2(u)).
inline double corona(double u1, double u2) {
    double a = theta_hat(u1 / 4.0, u2 / 4.0);
    double b = theta_hat(u1, u2);
    double d = a * a - b * b;
    return d > 0 ? std::sqrt(d) : 0.0;
}

// W_j at an integer grid frequency.
inline double w_j(int j, double xi1, double xi2) {
    double s = std::ldexp(1.0, -2 * j);  // 2^-2j
    return corona(s * xi1, s * xi2);
}

// Finest-scale window closing the telescope: sqrt(1 - Theta^2(2^-2j xi)).
// Needed so the squared-profile sum is positive up to the Nyquist corner.
inline double w_top(int j, double xi1, double xi2) {
    double s = std::ldexp(1.0, -2 * j);
    double t = theta_hat(s * xi1, s * xi2);
    double d = 1.0 - t * t;
    return d > 0 ? std::sqrt(d) : 0.0;
}

// Bump with |v(u-1)|^2 + |v(u)|^2 + |v(u+1)|^2 = 1 on [-1,1], supp in [-1,1].
inline double upsilon(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    if (u < 0) return std::sin(M_PI / 2.0 * meyer_nu(1.0 + u));
    return std::cos(M_PI / 2.0 * meyer_nu(u));
}

// Cone factor of a shearlet at scale j, shear l. Horizontal cone reads the
// slope 2^j xi2/xi1, vertical cone 2^j xi1/xi2.
inline double cone_h(int j, int l, double xi1, double xi2) {
    if (xi1 == 0.0) return 0.0;
    return upsilon(std::ldexp(xi2 / xi1, j) - double(l));
}
inline double cone_v(int j, int l, double xi1, double xi2) {
    if (xi2 == 0.0) return 0.0;
    return upsilon(std::ldexp(xi1 / xi2, j) - double(l));
}

// 1-D Gabor window, cos(pi u / 2) on [-1,1]: sum_n g1^2(u+n) = 1.
inline double gabor_g1(double u) {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return std::cos(M_PI / 2.0 * u);
}
inline double gabor_g(double u1, double u2) { return gabor_g1(u1) * gabor_g1(u2); }

// Largest scale admissible on an n-grid: 2^(2j-1) <= n/2.
inline int j_max_for(int n) {
    int j = 0;
    while ((1 << (2 * (j + 1))) <= n) j++;
    return j;
}

}  // namespace gsep::win
