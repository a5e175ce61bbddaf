#ifndef RECOVERLIB_KERNELS_HPP
#define RECOVERLIB_KERNELS_HPP

#include "recoverlib/sdp.hpp"

namespace recoverlib::kernels {

/// Schur complement of the HKM Newton system,
///   M_ij = sum_b Tr(A_i^b X^b A_j^b Sinv^b).
/// Sparse kernel; `parallel` distributes columns over OpenMP threads. The
/// result does not depend on the thread count.
RMatrix schur_complement(const sdp::RealSdp& problem, const std::vector<RMatrix>& x,
                         const std::vector<RMatrix>& s_inv, bool parallel);

/// Dense serial evaluation of the same matrix, kept as a test oracle.
RMatrix schur_complement_reference(const sdp::RealSdp& problem, const std::vector<RMatrix>& x,
                                   const std::vector<RMatrix>& s_inv);

/// A(G)_i = A_i . G for block-diagonal G (not necessarily symmetric).
RVector apply_constraints(const sdp::RealSdp& problem, const std::vector<RMatrix>& g,
                          bool parallel);

/// sum_i y_i A_i as dense blocks.
std::vector<RMatrix> adjoint_constraints(const sdp::RealSdp& problem, const RVector& y);

/// Threads available to parallel kernels (RECOVERLIB_THREADS caps it).
int thread_count();

}  // namespace recoverlib::kernels

#endif  // RECOVERLIB_KERNELS_HPP
