#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace surfacc {

// Inclusive grid lo, lo + step, ..., hi (the last point snaps to hi).
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;

    std::vector<double> values() const;
};

// Rows of numbers; NaN marks a cell where the bound is not valid and is written as an empty field.
struct CurveTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct FigureInfo {
    std::string id;
    std::string description;
    bool two_dimensional;
    GridSpec x;
    GridSpec y;  // unused for one-dimensional figures
};

std::vector<FigureInfo> figure_catalog();
const FigureInfo& figure_info(const std::string& id);

// Angles in degrees; lengths relative to ebs = 1 or lfs = 1 as the figure states.
CurveTable figure_curves(const std::string& id, const GridSpec& x, const GridSpec& y);

void write_csv(std::ostream& out, const CurveTable& table, const std::vector<std::string>& comments = {});

}  // namespace surfacc
