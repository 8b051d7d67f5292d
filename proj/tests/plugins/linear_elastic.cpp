// Small-strain isotropic elasticity over the plugin wire convention.
#include <cstdint>

extern "C" void umat_entry(double* stress, double*, double* ddsdde, const double*,
                           const double* dstran, const double*, double, const double* props,
                           int32_t nprops, int32_t, const double*, const double*, const double*,
                           int32_t ntens, int32_t* status) {
  if (nprops < 2 || ntens != 6) {
    *status = 1;
    return;
  }
  const double e = props[0], nu = props[1];
  const double lam = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double mu = e / (2.0 * (1.0 + nu));
  for (int k = 0; k < 36; ++k) ddsdde[k] = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ddsdde[i + 6 * j] = lam;
    ddsdde[i + 6 * i] = lam + 2.0 * mu;
    ddsdde[(i + 3) + 6 * (i + 3)] = mu;
  }
  double ds[6] = {0, 0, 0, 0, 0, 0};
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 6; ++i) ds[i] += ddsdde[i + 6 * j] * dstran[j];
  for (int i = 0; i < 6; ++i) stress[i] += ds[i];
  *status = 0;
}
