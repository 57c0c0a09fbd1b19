// SPDX-License-Identifier: Apache-2.0
//
// cmamimo: characteristic-mode degrees-of-freedom analysis for MIMO antennas
// Copyright (C) 2026 The cmamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CMAMIMO_TYPES_HPP
#define CMAMIMO_TYPES_HPP

#include <Eigen/Core>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cmamimo
{
    using cplx = std::complex<double>;
    using Vec3 = Eigen::Vector3d;
    using MatrixXd = Eigen::MatrixXd;
    using MatrixXc = Eigen::MatrixXcd;
    using VectorXd = Eigen::VectorXd;
    using VectorXc = Eigen::VectorXcd;
    using Matrix3c = Eigen::Matrix3cd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double c0 = 299792458.0;                   // speed of light [m/s]
    inline constexpr double mu0 = 4.0e-7 * pi;                  // vacuum permeability [H/m]
    inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);       // vacuum permittivity [F/m]
    inline constexpr double eta0 = mu0 * c0;                    // free-space impedance, ~376.730 Ohm
    inline constexpr cplx I1{0.0, 1.0};

    inline double wavenumber(double frequency) { return 2.0 * pi * frequency / c0; }
    inline double wavelength(double frequency) { return c0 / frequency; }

    // Error categories. The CLI maps each to a distinct exit code.
    struct Error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
    struct InputError : Error
    {
        using Error::Error;
    };
    struct GeometryError : Error
    {
        using Error::Error;
    };
    struct NumericalError : Error
    {
        using Error::Error;
    };
    struct ConfigError : Error
    {
        using Error::Error;
    };
}

#endif
