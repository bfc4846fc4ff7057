#ifndef DSD_MATRIX_HPP
#define DSD_MATRIX_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dsd {

// Dense row-major double matrix. Small and unclever on purpose; every hot
// path in the model is a product of one sparse operator and matrices whose
// widths are the feature/hidden dimensions.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    void fill(double v) { a.assign(a.size(), v); }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

inline void require_shape(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

// C = A * B
Mat matmul(const Mat& A, const Mat& B);
// C = A^T * B
Mat matmul_tn(const Mat& A, const Mat& B);
// C = A * B^T
Mat matmul_nt(const Mat& A, const Mat& B);

} // namespace dsd

#endif
