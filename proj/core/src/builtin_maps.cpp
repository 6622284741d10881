// Generated from assets/maps/*.json. Keep both in sync.
#include "builtin_maps.h"

namespace uavsim::detail {

const std::vector<BuiltinMap>& builtin_maps() {
    static const std::vector<BuiltinMap> maps = {
        {"manhattan32", 10.0, {
            "LLL.........NNNNNN..............",
            "LLL.........NNNNNN..............",
            "LLL.........NNNNNN..............",
            "...#####..#####..#####..####....",
            "...#####..#####..#####..####....",
            "...#####..#####..#####..####....",
            "...#####..#####..#####..####....",
            "................................",
            "............................NN..",
            "............................NN..",
            ".....###..#####.........####NN..",
            ".....###..#####...###...####NN..",
            "...##..#..#####...###...####NN..",
            "...##..#..#####.........####NN..",
            "NNN.............................",
            "NNN.............................",
            "................................",
            "...#####..#####..#####..####....",
            "...#####..#####..#####..####....",
            "...#####..#####..#####..##......",
            "...#####..#####..#####..##......",
            "................................",
            "................................",
            "................................",
            "...#####..##.....#####..####....",
            "...#####..##.....#####..####....",
            "...#####..#####..#####..####....",
            "...#####..#####..#####..####....",
            "................................",
            "..............NNNNN..........LLL",
            "..............NNNNN..........LLL",
            "..............NNNNN..........LLL",
        }},
        {"urban50", 10.0, {
            "......................NNNNN.......................",
            "......................NNNNN.......................",
            "..#######.....#######.NNNNN..............######...",
            "..#######.....#######.........#########..######...",
            "..#######.....#######.........#########..######...",
            "..#######.....#######.........#########..######...",
            "..#######.....#######.............###....######...",
            "..#######.....#######.............###....######...",
            "..#######.....#######.............###....######...",
            "..................................................",
            "..................................................",
            "..................................................",
            "..................................................",
            "..................................................",
            "..#######.....####............#######....######...",
            "..#######.....####............#######....######...",
            "..#######.....####............#######....######...",
            "..#######.....####............#######....######...",
            "..#######.....####............#######....######...",
            "..#######............LLLLLLLL.#######....######...",
            "..#######............LLLLLLLL.#######....######...",
            "...................LL.............................",
            "...................LL########.....................",
            "...................LL########.....................",
            "...................LL########.....................",
            "...................LL########.....................",
            "...................LL########.....................",
            "...................LL########.....................",
            "...................LL########.....................",
            "...................LL########.....................",
            "..#######.....#####LL.........#######.............",
            "..#######.....#######.........#######.....#####...",
            "..#######.....#######.........#######.....#####...",
            "..#######.....#######.........#######.....#####...",
            "..#######.....#######.........#######.....#####...",
            "..#######.....#######.........#######.............",
            "..................................................",
            "..................................................",
            "..................................................",
            "..................................................",
            "..................................................",
            "..................................................",
            "......NNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNN......",
            "......NNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNN......",
            "......NNNNNN####NNNNNNNNNNNNNN###NNNNNNNNNNN......",
            "......NNNNNN####NNNNNNNNNNNNNN###NNNNNNNNNNN......",
            "......NNNNNNNNNNNNNNNNNNNNNNNN###NNNNNNNNNNN......",
            "......NNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNNN......",
            "..................................................",
            "..................................................",
        }},
        {"open8", 10.0, {
            "LL......",
            "LL......",
            "........",
            "........",
            "........",
            "........",
            "........",
            "........",
        }},
    };
    return maps;
}

}  // namespace uavsim::detail
