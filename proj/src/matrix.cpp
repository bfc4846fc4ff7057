#include "dsd/matrix.hpp"

namespace dsd {

Mat matmul(const Mat& A, const Mat& B) {
    require_shape(A.cols == B.rows, "matmul");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

Mat matmul_tn(const Mat& A, const Mat& B) {
    require_shape(A.rows == B.rows, "matmul_tn");
    Mat C(A.cols, B.cols);
    for (int k = 0; k < A.rows; ++k)
        for (int i = 0; i < A.cols; ++i) {
            const double aki = A(k, i);
            if (aki == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) C(i, j) += aki * B(k, j);
        }
    return C;
}

Mat matmul_nt(const Mat& A, const Mat& B) {
    require_shape(A.cols == B.cols, "matmul_nt");
    Mat C(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.rows; ++j) {
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += A(i, k) * B(j, k);
            C(i, j) = s;
        }
    return C;
}

} // namespace dsd
