#ifndef CONVOSCORE_ASSIGNMENT_HPP
#define CONVOSCORE_ASSIGNMENT_HPP

#include <vector>

namespace convoscore {

// Solves the rectangular assignment problem in O(n^2 m): given a cost matrix
// with rows <= cols, returns for each row the column it is assigned to so
// that the total cost is minimal. Every row is assigned a distinct column.
std::vector<int> solve_assignment_min(
    const std::vector<std::vector<double>>& cost);

// Assignment maximizing total value; rows may exceed columns, in which case
// surplus rows come back as -1.
std::vector<int> solve_assignment_max(
    const std::vector<std::vector<double>>& value);

}  // namespace convoscore

#endif
