// solution_io.hpp
//
// Assignment-list file for the experimentation platform: one row per
// member with its role, variant and (for alters) the attached ego.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "egocluster/clustering.hpp"

namespace egocluster {

// Columns member_id,role,variant,attached_ego; egos leave attached_ego
// empty; rows sorted by member id in the solution's id mode.
void write_solution_csv(const EgoClusterSolution& solution, std::ostream& out);
void write_solution_csv(const EgoClusterSolution& solution, const std::filesystem::path& path);

// Strict reader for the same format. Any structural problem throws
// std::runtime_error naming the offending row and field. network_type,
// seed and treatment_fraction are not stored in the file and stay at
// their defaults.
EgoClusterSolution load_solution_csv(std::istream& in, IdMode id_mode = IdMode::text);
EgoClusterSolution load_solution_csv(const std::filesystem::path& path,
                                     IdMode id_mode = IdMode::text);

} // namespace egocluster
