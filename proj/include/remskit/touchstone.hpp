// SPDX-License-Identifier: Apache-2.0
#pragma once

// Touchstone v1 (.sNp), S-parameters only.

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "remskit/types.hpp"

namespace remskit {

enum class TouchstoneFormat { RI, MA, DB };

struct TouchstoneData {
    int n_ports = 0;
    double r0 = 50.0;
    std::string frequency_unit = "GHz";  // as written in the option line
    TouchstoneFormat format = TouchstoneFormat::MA;
    std::vector<double> frequencies;  // in frequency_unit
    // Raw value pairs per frequency, row-major over (i, j), as stored in the file's format.
    std::vector<std::vector<std::array<double, 2>>> pairs;

    std::size_t size() const { return frequencies.size(); }
    double frequency_hz(std::size_t k) const;
    CMatrix matrix(std::size_t k) const;
    void set_matrix(std::size_t k, const CMatrix& s);
};

TouchstoneData parse_touchstone(std::string_view text, int n_ports);
std::string write_touchstone(const TouchstoneData& data);

// Port count from the .sNp extension.
int touchstone_ports_from_path(const std::filesystem::path& path);
TouchstoneData load_touchstone(const std::filesystem::path& path);

std::array<double, 2> to_touchstone_pair(Complex c, TouchstoneFormat f);
Complex from_touchstone_pair(const std::array<double, 2>& p, TouchstoneFormat f);

}  // namespace remskit
