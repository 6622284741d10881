#include "uavsim/environment_map.h"

#include <cstdlib>
#include <stdexcept>

namespace uavsim {

EnvironmentMap EnvironmentMap::from_grid(std::string name, double cell_size_m,
                                         const std::vector<std::string>& rows) {
    const int m = static_cast<int>(rows.size());
    if (m < 1) throw std::invalid_argument("map '" + name + "': empty grid");
    if (!(cell_size_m > 0.0)) throw std::invalid_argument("map '" + name + "': cell_size_m must be positive");

    EnvironmentMap env;
    env.name_ = std::move(name);
    env.size_ = m;
    env.cell_size_m_ = cell_size_m;
    env.layers_ = Tensor3<float>(kLayers, m, m);

    bool any_landing = false;
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(rows[i].size()) != m) {
            throw std::invalid_argument("map '" + env.name_ + "': row " + std::to_string(i) + " has " +
                                        std::to_string(rows[i].size()) + " cells, expected " +
                                        std::to_string(m) + " (grid must be square)");
        }
        for (int j = 0; j < m; ++j) {
            switch (rows[i][j]) {
                case '.':
                    break;
                case 'L':
                    env.layers_(0, i, j) = 1.0f;
                    any_landing = true;
                    break;
                case 'N':
                    env.layers_(1, i, j) = 1.0f;
                    break;
                case '#':
                    env.layers_(1, i, j) = 1.0f;
                    env.layers_(2, i, j) = 1.0f;
                    break;
                default:
                    throw std::invalid_argument("map '" + env.name_ + "': unknown cell code '" +
                                                std::string(1, rows[i][j]) + "' at " +
                                                to_string(Cell{i, j}));
            }
        }
    }
    if (!any_landing) throw std::invalid_argument("map '" + env.name_ + "': no start/landing ('L') cell");
    return env;
}

std::vector<Cell> EnvironmentMap::landing_cells() const {
    std::vector<Cell> out;
    for (int i = 0; i < size_; ++i)
        for (int j = 0; j < size_; ++j)
            if (is_landing({i, j})) out.push_back({i, j});
    return out;
}

std::vector<std::string> EnvironmentMap::to_grid() const {
    std::vector<std::string> rows(size_, std::string(size_, '.'));
    for (int i = 0; i < size_; ++i) {
        for (int j = 0; j < size_; ++j) {
            const Cell c{i, j};
            if (is_obstacle(c)) rows[i][j] = '#';
            else if (is_blocked(c)) rows[i][j] = 'N';
            else if (is_landing(c)) rows[i][j] = 'L';
        }
    }
    return rows;
}

std::vector<Cell> supercover_line(Cell from, Cell to) {
    // Walk the segment in doubled coordinates so cell boundaries sit on odd
    // integers and every comparison stays exact.
    const int dr = to.row - from.row;
    const int dc = to.col - from.col;
    const int nr = std::abs(dr);
    const int nc = std::abs(dc);
    const int sr = dr > 0 ? 1 : -1;
    const int sc = dc > 0 ? 1 : -1;

    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(nr + nc + 1));
    Cell cur = from;
    out.push_back(cur);
    int ir = 0;
    int ic = 0;
    while (ir < nr || ic < nc) {
        // Compare the parameter at which the next row and column boundary is hit:
        // (1 + 2*ir) / (2*nr) against (1 + 2*ic) / (2*nc).
        const long long lhs = static_cast<long long>(1 + 2 * ir) * nc;
        const long long rhs = static_cast<long long>(1 + 2 * ic) * nr;
        if (lhs == rhs) {
            // Through a corner: both side cells are touched, then the diagonal.
            out.push_back({cur.row + sr, cur.col});
            out.push_back({cur.row, cur.col + sc});
            cur.row += sr;
            cur.col += sc;
            ++ir;
            ++ic;
        } else if (lhs < rhs) {
            cur.row += sr;
            ++ir;
        } else {
            cur.col += sc;
            ++ic;
        }
        out.push_back(cur);
    }
    return out;
}

bool line_of_sight(const EnvironmentMap& env, Cell from, Cell to) {
    if (from == to) return true;
    for (const Cell& c : supercover_line(from, to)) {
        if (c == from || c == to) continue;
        if (env.on_map(c) && env.is_obstacle(c)) return false;
    }
    return true;
}

}  // namespace uavsim
