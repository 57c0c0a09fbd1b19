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

#ifndef CMAMIMO_PLOT_HPP
#define CMAMIMO_PLOT_HPP

#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace cmamimo::plot
{
    enum class Style
    {
        line,
        markers,
        line_markers
    };

    struct Series
    {
        std::string name;
        std::vector<double> x, y;
        Style style = Style::line_markers;
    };

    // Horizontal reference line, e.g. a threshold.
    struct HLine
    {
        std::string name;
        double y = 0.0;
    };

    struct Figure
    {
        std::string title, xlabel, ylabel;
        bool log_y = false;
        std::vector<Series> series;
        std::vector<HLine> hlines;
        int width = 640, height = 420;

        std::string svg() const;
        std::string csv() const;
    };

    namespace detail
    {
        inline const char *palette(std::size_t i)
        {
            static const char *c[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
            return c[i % 6];
        }

        inline std::string escape(const std::string &s)
        {
            std::string o;
            for (char c : s)
            {
                if (c == '<')
                    o += "&lt;";
                else if (c == '>')
                    o += "&gt;";
                else if (c == '&')
                    o += "&amp;";
                else
                    o += c;
            }
            return o;
        }

        inline std::string num(double v)
        {
            std::ostringstream os;
            os.precision(4);
            os << v;
            return os.str();
        }

        inline std::vector<double> linear_ticks(double lo, double hi)
        {
            const double span = hi - lo;
            const double raw = span / 5.0;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            double step = mag;
            for (double m : {1.0, 2.0, 5.0, 10.0})
                if (m * mag >= raw)
                {
                    step = m * mag;
                    break;
                }
            std::vector<double> t;
            for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
                t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
            return t;
        }
    }

    inline std::string Figure::svg() const
    {
        const double ml = 70, mr = 20, mt = 36, mb = 50;
        const double pw = width - ml - mr, ph = height - mt - mb;

        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
        auto take_y = [&](double y) {
            if (!std::isfinite(y) || (log_y && !(y > 0.0)))
                return;
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        };
        for (const auto &s : series)
        {
            for (double x : s.x)
                if (std::isfinite(x))
                {
                    xlo = std::min(xlo, x);
                    xhi = std::max(xhi, x);
                }
            for (double y : s.y)
                take_y(y);
        }
        for (const auto &h : hlines)
            take_y(h.y);
        if (!std::isfinite(xlo))
        {
            xlo = 0;
            xhi = 1;
        }
        if (!std::isfinite(ylo))
        {
            ylo = log_y ? 1.0 : 0.0;
            yhi = log_y ? 10.0 : 1.0;
        }
        if (xhi <= xlo)
        {
            xlo -= 0.5;
            xhi += 0.5;
        }
        if (log_y)
        {
            ylo = std::pow(10.0, std::floor(std::log10(ylo)));
            yhi = std::pow(10.0, std::ceil(std::log10(yhi)));
            if (yhi <= ylo)
                yhi = ylo * 10.0;
        }
        else
        {
            if (yhi <= ylo)
            {
                const double pad = ylo == 0.0 ? 1.0 : 0.1 * std::abs(ylo);
                ylo -= pad;
                yhi += pad;
            }
            const double pad = 0.05 * (yhi - ylo);
            ylo -= pad;
            yhi += pad;
        }

        auto X = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
        auto Y = [&](double y) {
            const double t = log_y ? (std::log10(y) - std::log10(ylo)) / (std::log10(yhi) - std::log10(ylo)) : (y - ylo) / (yhi - ylo);
            return mt + (1.0 - t) * ph;
        };

        std::ostringstream o;
        o.precision(6);
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        o << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(title) << "</text>\n";
        o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

        for (double t : detail::linear_ticks(xlo, xhi))
            o << "<line x1=\"" << X(t) << "\" y1=\"" << mt + ph << "\" x2=\"" << X(t) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>"
              << "<text x=\"" << X(t) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">" << detail::num(t) << "</text>\n";
        std::vector<double> yt;
        if (log_y)
            for (double v = ylo; v <= yhi * 1.0000001; v *= 10.0)
                yt.push_back(v);
        else
            yt = detail::linear_ticks(ylo, yhi);
        for (double t : yt)
            o << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(t) << "\" x2=\"" << ml + pw << "\" y2=\"" << Y(t) << "\" stroke=\"#dddddd\"/>"
              << "<text x=\"" << ml - 8 << "\" y=\"" << Y(t) + 4 << "\" text-anchor=\"end\">" << detail::num(t) << "</text>\n";
        o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << detail::escape(xlabel) << "</text>\n";
        o << "<text transform=\"translate(16," << mt + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape(ylabel) << "</text>\n";

        for (std::size_t k = 0; k < hlines.size(); ++k)
        {
            const auto &h = hlines[k];
            if (log_y && !(h.y > 0.0))
                continue;
            o << "<line x1=\"" << ml << "\" y1=\"" << Y(h.y) << "\" x2=\"" << ml + pw << "\" y2=\"" << Y(h.y)
              << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>"
              << "<text x=\"" << ml + pw - 4 << "\" y=\"" << Y(h.y) - 4 << "\" text-anchor=\"end\" fill=\"#555555\">" << detail::escape(h.name)
              << "</text>\n";
        }

        for (std::size_t k = 0; k < series.size(); ++k)
        {
            const auto &s = series[k];
            const char *col = detail::palette(k);
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && (!log_y || s.y[i] > 0.0))
                    pts.emplace_back(X(s.x[i]), Y(s.y[i]));
            if (s.style != Style::markers && pts.size() > 1)
            {
                o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
                for (const auto &[px, py] : pts)
                    o << px << ',' << py << ' ';
                o << "\"/>\n";
            }
            if (s.style != Style::line)
                for (const auto &[px, py] : pts)
                    o << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"" << col << "\"/>\n";
            const double ly = mt + 14 + 16 * static_cast<double>(k);
            o << "<line x1=\"" << ml + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << col
              << "\" stroke-width=\"2\"/><text x=\"" << ml + 36 << "\" y=\"" << ly << "\">" << detail::escape(s.name) << "</text>\n";
        }
        o << "</svg>\n";
        return o.str();
    }

    // Every number drawn in the figure, one row per point.
    inline std::string Figure::csv() const
    {
        std::ostringstream o;
        o.precision(17);
        o << "series,x,y\n";
        for (const auto &s : series)
            for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
                o << s.name << ',' << s.x[i] << ',' << s.y[i] << '\n';
        for (const auto &h : hlines)
            o << h.name << ",," << h.y << '\n';
        return o.str();
    }

    // Writes <stem>.svg and <stem>.csv side by side.
    inline void write_figure(const std::filesystem::path &dir, const std::string &stem, const Figure &fig)
    {
        io::write_file_atomic(dir / (stem + ".svg"), fig.svg());
        io::write_file_atomic(dir / (stem + ".csv"), fig.csv());
    }
}

#endif
