#ifndef SPECTRA_H
#define SPECTRA_H

/*
 * C interface to the spectra library: diffraction spectra of one-dimensional
 * Pisot-unit inflation tilings via Rauzy-fractal windows and the internal
 * Fourier-matrix cocycle.
 *
 * All functions return SPECTRA_OK (0) on success or an error status; the
 * message for the last failure on the calling thread is available from
 * spectra_last_error(). Strings written to out-parameters are heap-allocated
 * and must be released with spectra_string_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct spectra_system spectra_system;

typedef enum {
    SPECTRA_OK = 0,
    SPECTRA_ERR_VALIDATION = 2,
    SPECTRA_ERR_CONVERGENCE = 3,
    SPECTRA_ERR_IO = 4
} spectra_status;

typedef struct {
    double pf_tol;        /* <= 0 -> 1e-12 */
    double window_tol;    /* <= 0 -> 1e-12 */
    long window_points;   /* <= 0 -> 20000 (cloud points per letter) */
    long long mc_samples; /* <= 0 -> 400000 (Monte-Carlo samples per letter) */
    double cocycle_tol;   /* <= 0 -> 1e-10 */
    int cocycle_nmax;     /* <= 0 -> 200 */
    int threads;          /* <= 0 -> 1 */
    int power_override;   /* 0 -> auto */
    const char* seed;     /* "x|y" or NULL -> auto */
} spectra_options;

void spectra_options_init(spectra_options* opt);

const char* spectra_version(void);
const char* spectra_last_error(void);
void spectra_string_free(char* s);

spectra_status spectra_system_open(const char* rule_path, const spectra_options* opt, spectra_system** out);
spectra_status spectra_system_from_text(const char* text, const char* name, const spectra_options* opt,
                                        spectra_system** out);
spectra_status spectra_system_from_fixture(const char* fixture, const spectra_options* opt, spectra_system** out);
void spectra_system_close(spectra_system* sys);

int spectra_alphabet_size(const spectra_system* sys);
int spectra_field_degree(const spectra_system* sys);

/* Rule summary (validation already happened at construction). */
spectra_status spectra_rule_report(spectra_system* sys, char** out_text);

/* Minimal polynomial, conjugate roots, det(B), Fourier module generator. */
spectra_status spectra_field_report(spectra_system* sys, int as_json, char** out_text);

/* Rauzy windows: summary JSON, per-letter CSV, figure SVG. */
spectra_status spectra_windows_json(spectra_system* sys, char** out_json);
spectra_status spectra_windows_csv(spectra_system* sys, char** out_csv);
spectra_status spectra_windows_svg(spectra_system* sys, char** out_svg);

/* Matrix Riesz product at internal point y (ydim = field degree - 1). */
spectra_status spectra_cocycle_json(spectra_system* sys, const double* y, int ydim, double tol, int nmax,
                                    char** out_json);

/* Compute the peak table for k in [0, kmax], Miller indices in [-box, box].
 * weights may be NULL (all ones); floor_rel <= 0 -> 1e-6. The table is
 * cached on the handle for the getters below. */
spectra_status spectra_diffract(spectra_system* sys, long box, double kmax, double floor_rel,
                                const double* weights_re, const double* weights_im, int nweights);
spectra_status spectra_spectrum_json(spectra_system* sys, char** out_json);
spectra_status spectra_spectrum_csv(spectra_system* sys, char** out_csv);
spectra_status spectra_spectrum_svg(spectra_system* sys, char** out_svg);

/* Brute-force Fourier-Bohr check at one Miller tuple with patch radius r. */
spectra_status spectra_verify_json(spectra_system* sys, const long* miller, int nmiller, double r, char** out_json);

/* Built-in fixture catalogue. */
spectra_status spectra_fixture_names(char** out_json);
spectra_status spectra_fixture_text(const char* name, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* SPECTRA_H */
