// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace satrecon::utm {

enum class Hemisphere { North, South };

struct Geodetic {
  double lat = 0.0;  ///< degrees
  double lon = 0.0;  ///< degrees
};

struct Utm {
  double easting = 0.0;
  double northing = 0.0;
  int zone = 0;
  Hemisphere hemisphere = Hemisphere::North;
};

/// Central meridian of a UTM zone, degrees.
double central_meridian(int zone);

/// WGS84 transverse Mercator, Krueger series to sixth order in the third
/// flattening. Valid well beyond the nominal 6 degree zone width.
Utm geodetic_to_utm(double lat_deg, double lon_deg, int zone, Hemisphere hemisphere);

/// Inverse of geodetic_to_utm. Throws InvalidArgument for zone outside
/// [1, 60], easting outside (0, 1e6) or northing outside [0, 1e7].
Geodetic utm_to_geodetic(double easting, double northing, int zone, Hemisphere hemisphere);

}  // namespace satrecon::utm
