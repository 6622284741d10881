#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavsim/tensor.h"

namespace uavsim {

/// Static environment: start/landing zones, no-fly zones and obstacles.
///
/// Holds three boolean layers of size M x M:
///   layer 0: start/landing zones
///   layer 1: NFZ union obstacles (cells the UAV may never occupy)
///   layer 2: obstacles only (block line of sight and cannot be targets)
class EnvironmentMap {
public:
    static constexpr int kLayers = 3;

    EnvironmentMap() = default;

    /// Builds a map from its textual grid ('.', 'L', 'N', '#'). Throws
    /// std::invalid_argument on an unknown code, ragged/non-square rows or a
    /// map without any landing cell.
    static EnvironmentMap from_grid(std::string name, double cell_size_m,
                                    const std::vector<std::string>& rows);

    const std::string& name() const { return name_; }
    int size() const { return size_; }
    double cell_size_m() const { return cell_size_m_; }

    bool on_map(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < size_ && c.col < size_; }
    bool is_landing(Cell c) const { return layer(0, c); }
    bool is_blocked(Cell c) const { return layer(1, c); }
    bool is_obstacle(Cell c) const { return layer(2, c); }

    std::vector<Cell> landing_cells() const;

    /// The layers as a float tensor with 3 channels, used by the map pipeline.
    const Tensor3<float>& layers() const { return layers_; }

    /// Grid rows using the cell codes of the map file format.
    std::vector<std::string> to_grid() const;

private:
    bool layer(int k, Cell c) const { return layers_(k, c.row, c.col) != 0.0f; }

    std::string name_;
    int size_ = 0;
    double cell_size_m_ = 10.0;
    Tensor3<float> layers_;
};

/// Cells crossed by the segment between the centres of `from` and `to`,
/// including both end cells. Where the segment passes exactly through a
/// grid corner both side cells are reported (supercover).
std::vector<Cell> supercover_line(Cell from, Cell to);

/// True iff no obstacle cell lies on the supercover line between the two
/// cells, end cells excluded.
bool line_of_sight(const EnvironmentMap& env, Cell from, Cell to);

}  // namespace uavsim
