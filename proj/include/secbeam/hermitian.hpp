#pragma once

#include "secbeam/types.hpp"

namespace secbeam {

// Real coordinates of an n x n Hermitian matrix in an orthonormal basis
// (trace inner product): n diagonal entries, then sqrt(2) Re and sqrt(2) Im
// of each strict upper entry. Length n^2.
RVec hvec(const CMat& X);
CMat hmat(const Eigen::Ref<const RVec>& x, int n);

// Basis element j as an n x n matrix (mostly for tests).
CMat hbasis(int j, int n);

// Column j of the matrix of Y -> M^H Y M ... expressed as hvec(L E_j L^H),
// with E_j the j-th basis element of the column space of L.
void add_congruence_block(const CMat& L, double scale, Eigen::Ref<RMat> out);

CMat herm(const CMat& A);

// Matrix square root and inverse square root of a Hermitian PD matrix.
CMat sqrtm_pd(const CMat& A);
CMat inv_sqrtm_pd(const CMat& A);

}  // namespace secbeam
