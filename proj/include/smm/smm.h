#ifndef SMM_SMM_H
#define SMM_SMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SMM_API __declspec(dllexport)
#else
#define SMM_API __attribute__((visibility("default")))
#endif

typedef struct smm_points smm_points;
typedef struct smm_matching smm_matching;

typedef enum smm_status {
  SMM_OK = 0,
  SMM_ERR_ARGUMENT = 1,
  SMM_ERR_PARSE = 2,
  SMM_ERR_IO = 3,
  SMM_ERR_INTERNAL = 4
} smm_status;

/* Message of the last failed call on this thread; "" when none. */
SMM_API const char* smm_last_error(void);
SMM_API const char* smm_version(void);
/* Releases strings returned through char** out-parameters. */
SMM_API void smm_free_string(char* s);

/* Point configurations. The seed is recorded with the points. */
SMM_API smm_status smm_points_sample_poisson(double length, uint64_t seed, smm_points** out);
SMM_API smm_status smm_points_sample_cycle(size_t n, double circumference, uint64_t seed, smm_points** out);
SMM_API smm_status smm_points_perturbed_lattice(size_t cells, int copies, uint64_t seed, smm_points** out);
SMM_API smm_status smm_points_from_array(int is_cycle, double extent, const double* positions, size_t n,
                                         smm_points** out);
SMM_API smm_status smm_points_load(const char* path, smm_points** out);
SMM_API smm_status smm_points_save(const smm_points* points, const char* path);
/* Point file text (header line plus one position per line). */
SMM_API smm_status smm_points_to_string(const smm_points* points, char** out);
SMM_API size_t smm_points_count(const smm_points* points);
SMM_API double smm_points_extent(const smm_points* points);
SMM_API int smm_points_is_cycle(const smm_points* points);
SMM_API const double* smm_points_data(const smm_points* points);
SMM_API void smm_points_free(smm_points* points);

/* Draws degrees from `degree_spec` ("k", "a:p,b:q" or "e=2.5") and, for
   random_direction, right-stub counts, all from `seed`; then runs `scheme`
   (stable, random_direction, core, core_fast, iterated, example1, example2). */
SMM_API smm_status smm_match(const smm_points* points, const char* degree_spec, const char* scheme, uint64_t seed,
                             smm_matching** out);
/* Explicit marks; `rights` may be NULL. */
SMM_API smm_status smm_match_with_marks(const smm_points* points, const int* degrees, const int* rights,
                                        const char* scheme, smm_matching** out);
/* Edge list with header `i,j,length`. */
SMM_API smm_status smm_matching_load_csv(const smm_points* points, const char* path, smm_matching** out);
SMM_API size_t smm_matching_edge_count(const smm_matching* matching);
SMM_API smm_status smm_matching_edge(const smm_matching* matching, size_t index, uint32_t* u, uint32_t* v);
SMM_API size_t smm_matching_leftover(const smm_matching* matching);
SMM_API smm_status smm_matching_to_csv(const smm_matching* matching, char** out);
SMM_API smm_status smm_matching_summary_json(const smm_matching* matching, char** out);
SMM_API void smm_matching_free(smm_matching* matching);

/* options_json: {"good": [a, b], "component_lists": bool}; NULL for defaults.
   per_point_csv may be NULL. */
SMM_API smm_status smm_analyze(const smm_matching* matching, const char* options_json, char** json_out,
                               char** per_point_csv);
/* Stability audit: mode "stable", "directed" or "core"; writes the number of
   unstable pairs. */
SMM_API smm_status smm_audit(const smm_matching* matching, const char* mode, size_t* unstable);

/* options_json: {"color_stubs": bool, "meta": bool, "width": number}. */
SMM_API smm_status smm_draw_svg(const smm_matching* matching, const char* options_json, char** svg);

/* spec_json: {"kind": "goodness"|"table1"|"tails"|"renorm"|"blocks", ...}.
   Either output may be NULL. */
SMM_API smm_status smm_run_experiment(const char* spec_json, int with_meta, char** report_json, char** report_csv);

SMM_API smm_status smm_binomial_tail(uint64_t n, uint64_t k, double p0, double* out);
SMM_API double smm_renorm_threshold(void);

#ifdef __cplusplus
}
#endif

#endif
