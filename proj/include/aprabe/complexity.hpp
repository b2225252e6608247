#pragma once

// Closed-form operation counts of this implementation next to the reference
// complexity table. The table charges neither the G3 randomizers R = X3^rho
// (one exponentiation each here) nor GT exponentiations in decryption;
// everything else matches term by term.
//
//   keygen   (l rows, depth k):      G exps  l * (2L - k + 6)  = l*(L+3)      + l*(L-k+3) randomizers
//   encrypt  (|S| vectors, depth k): G exps (k+2)|S| + 1, GT exps 1; total equals (k+2)|S| + 2
//   delegate (l' child rows, k->k+1): G exps l' * (3L - 2k + 7) = l'*(2L-k+5) + l'*(L-k+2) randomizers
//   decrypt  (l* matching rows):     pairings 3 l*, GT exps l*

#include <cstdint>

namespace aprabe::complexity {

struct Counts {
    std::uint64_t exponentiations = 0;
    std::uint64_t gt_exponentiations = 0;
    std::uint64_t pairings = 0;
    friend bool operator==(const Counts&, const Counts&) = default;
};

inline Counts keygen(std::uint64_t levels, std::uint64_t depth, std::uint64_t rows) {
    return {rows * (2 * levels - depth + 6), 0, 0};
}

inline Counts encrypt(std::uint64_t depth, std::uint64_t set_size) { return {(depth + 2) * set_size + 1, 1, 0}; }

inline Counts delegate(std::uint64_t levels, std::uint64_t depth, std::uint64_t child_rows) {
    return {child_rows * (3 * levels - 2 * depth + 7), 0, 0};
}

inline Counts decrypt(std::uint64_t matching_rows) { return {0, matching_rows, 3 * matching_rows}; }

// Reference costs, in units of t_e (exponentiations) and t_p (pairings).
namespace table {
inline std::uint64_t keygen(std::uint64_t levels, std::uint64_t rows) { return (levels + 3) * rows; }
inline std::uint64_t delegate(std::uint64_t levels, std::uint64_t depth, std::uint64_t child_rows) {
    return (2 * levels - depth + 5) * child_rows;
}
inline std::uint64_t encrypt(std::uint64_t depth, std::uint64_t set_size) { return (depth + 2) * set_size + 2; }
inline std::uint64_t decrypt_pairings(std::uint64_t matching_rows) { return 3 * matching_rows; }
}  // namespace table

// Randomizer exponentiations not charged by the table.
inline std::uint64_t keygen_randomizers(std::uint64_t levels, std::uint64_t depth, std::uint64_t rows) {
    return rows * (levels - depth + 3);
}
inline std::uint64_t delegate_randomizers(std::uint64_t levels, std::uint64_t depth, std::uint64_t child_rows) {
    return child_rows * (levels - depth + 2);
}

}  // namespace aprabe::complexity
