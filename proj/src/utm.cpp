// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/utm.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "satrecon/error.hpp"

namespace satrecon::utm {
namespace {

constexpr double kA = 6378137.0;              // WGS84 semi-major axis
constexpr double kF = 1.0 / 298.257223563;    // WGS84 flattening
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;
constexpr double kDeg = std::numbers::pi / 180.0;

struct Series {
  double e;       // eccentricity
  double e2;      // eccentricity squared
  double a_rect;  // rectifying radius
  std::array<double, 6> alpha;
  std::array<double, 6> beta;
};

Series make_series() {
  Series s{};
  const double n = kF / (2.0 - kF);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  s.e2 = kF * (2.0 - kF);
  s.e = std::sqrt(s.e2);
  s.a_rect = kA / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);

  s.alpha = {
      n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
      13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
      61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
      49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
      34729 * n5 / 80640 - 3418889 * n6 / 1995840,
      212378941 * n6 / 319334400,
  };
  s.beta = {
      n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
      n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
      17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
      4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
      4583 * n5 / 161280 - 108847 * n6 / 3991680,
      20648693 * n6 / 638668800,
  };
  return s;
}

const Series& series() {
  static const Series s = make_series();
  return s;
}

void check_zone(int zone) {
  if (zone < 1 || zone > 60) throw InvalidArgument("UTM zone must be in [1, 60]");
}

// Conformal latitude tangent from geodetic latitude tangent.
double taup(double tau, double e) {
  const double tau1 = std::hypot(1.0, tau);
  const double sig = std::sinh(e * std::atanh(e * tau / tau1));
  return std::hypot(1.0, sig) * tau - sig * tau1;
}

// Newton inversion of taup.
double tau_from_taup(double tp, const Series& s) {
  const double e2m = 1.0 - s.e2;
  double tau = tp / e2m;
  for (int i = 0; i < 8; ++i) {
    const double t = taup(tau, s.e);
    const double dtau = (tp - t) / (std::hypot(1.0, t) * std::hypot(1.0, tau)) *
                        (1.0 + e2m * tau * tau) / e2m;
    tau += dtau;
    if (std::abs(dtau) < 1e-15 * std::max(1.0, std::abs(tau))) break;
  }
  return tau;
}

}  // namespace

double central_meridian(int zone) {
  check_zone(zone);
  return -183.0 + 6.0 * zone;
}

Utm geodetic_to_utm(double lat_deg, double lon_deg, int zone, Hemisphere hemisphere) {
  check_zone(zone);
  if (!(std::abs(lat_deg) <= 90.0)) throw InvalidArgument("latitude out of range");
  const auto& s = series();

  double dlon = lon_deg - central_meridian(zone);
  dlon = std::remainder(dlon, 360.0);
  const double lam = dlon * kDeg;
  const double phi = lat_deg * kDeg;

  const double tp = taup(std::tan(phi), s.e);
  const double xi_p = std::atan2(tp, std::cos(lam));
  const double eta_p = std::asinh(std::sin(lam) / std::hypot(tp, std::cos(lam)));

  double xi = xi_p, eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[j - 1];
    xi += a * std::sin(2 * j * xi_p) * std::cosh(2 * j * eta_p);
    eta += a * std::cos(2 * j * xi_p) * std::sinh(2 * j * eta_p);
  }

  Utm out;
  out.zone = zone;
  out.hemisphere = hemisphere;
  out.easting = kFalseEasting + kK0 * s.a_rect * eta;
  out.northing = kK0 * s.a_rect * xi;
  if (hemisphere == Hemisphere::South) out.northing += kFalseNorthingSouth;
  return out;
}

Geodetic utm_to_geodetic(double easting, double northing, int zone, Hemisphere hemisphere) {
  check_zone(zone);
  if (!(easting > 0.0 && easting < 1e6)) throw InvalidArgument("UTM easting out of range (0, 1e6)");
  if (!(northing >= 0.0 && northing <= 1e7)) throw InvalidArgument("UTM northing out of range [0, 1e7]");
  const auto& s = series();

  double y = northing;
  if (hemisphere == Hemisphere::South) y -= kFalseNorthingSouth;
  const double xi = y / (kK0 * s.a_rect);
  const double eta = (easting - kFalseEasting) / (kK0 * s.a_rect);

  double xi_p = xi, eta_p = eta;
  for (int j = 1; j <= 6; ++j) {
    const double b = s.beta[j - 1];
    xi_p -= b * std::sin(2 * j * xi) * std::cosh(2 * j * eta);
    eta_p -= b * std::cos(2 * j * xi) * std::sinh(2 * j * eta);
  }

  const double sinh_eta = std::sinh(eta_p);
  const double cos_xi = std::cos(xi_p);
  const double tp = std::sin(xi_p) / std::hypot(sinh_eta, cos_xi);
  const double tau = tau_from_taup(tp, s);

  Geodetic out;
  out.lat = std::atan(tau) / kDeg;
  out.lon = central_meridian(zone) + std::atan2(sinh_eta, cos_xi) / kDeg;
  return out;
}

}  // namespace satrecon::utm
