/* Public C interface of the jeanie shared library.
 *
 * All heap objects are opaque handles freed by their matching *_free
 * function. Functions returning jeanie_status set a thread-local error
 * message retrievable with jeanie_last_error() on failure. Strings returned
 * through char** are owned by the caller and released with
 * jeanie_string_free().
 */
#ifndef JEANIE_H_
#define JEANIE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define JEANIE_API __declspec(dllexport)
#else
#define JEANIE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jeanie_status {
  JEANIE_OK = 0,
  JEANIE_ERR_INVALID_ARGUMENT = 1,
  JEANIE_ERR_DIMENSION = 2,
  JEANIE_ERR_INDEX = 3,
  JEANIE_ERR_IO = 4,
  JEANIE_ERR_FORMAT = 5,
  JEANIE_ERR_TOO_LARGE = 6,
  JEANIE_ERR_INSUFFICIENT_DATA = 7,
  JEANIE_ERR_UNSUPPORTED = 8,
  JEANIE_ERR_INTERNAL = 9
} jeanie_status;

typedef struct jeanie_config jeanie_config;
typedef struct jeanie_sequence jeanie_sequence;
typedef struct jeanie_corpus jeanie_corpus;
typedef struct jeanie_camera jeanie_camera;
typedef struct jeanie_features jeanie_features;
typedef struct jeanie_alignment jeanie_alignment;

JEANIE_API const char* jeanie_version(void);
JEANIE_API const char* jeanie_last_error(void);
JEANIE_API void jeanie_string_free(char* s);

/* ---- configuration ---- */
JEANIE_API jeanie_status jeanie_config_create(jeanie_config** out);
JEANIE_API jeanie_status jeanie_config_load(const char* path, jeanie_config** out);
JEANIE_API jeanie_status jeanie_config_parse(const char* text, jeanie_config** out);
JEANIE_API jeanie_status jeanie_config_set(jeanie_config* cfg, const char* key, const char* value);
JEANIE_API jeanie_status jeanie_config_get(const jeanie_config* cfg, const char* key, char** out);
/* 16 hex characters + NUL; stable under key reordering and whitespace */
JEANIE_API jeanie_status jeanie_config_hash(const jeanie_config* cfg, char out[17]);
JEANIE_API void jeanie_config_free(jeanie_config* cfg);

/* ---- sequences and corpora ---- */
JEANIE_API jeanie_status jeanie_sequence_parse_json(const char* text, jeanie_sequence** out);
JEANIE_API jeanie_status jeanie_sequence_load(const char* path, jeanie_sequence** out);
JEANIE_API jeanie_status jeanie_sequence_to_json(const jeanie_sequence* seq, char** out_json);
JEANIE_API int jeanie_sequence_frames(const jeanie_sequence* seq);
JEANIE_API int jeanie_sequence_joints(const jeanie_sequence* seq);
JEANIE_API const char* jeanie_sequence_label(const jeanie_sequence* seq);
JEANIE_API void jeanie_sequence_free(jeanie_sequence* seq);

JEANIE_API jeanie_status jeanie_corpus_load(const char* path, jeanie_corpus** out);
JEANIE_API jeanie_status jeanie_corpus_synth(int n_classes, int per_class, int joints, int frames,
                                             uint64_t seed, double view_noise_deg,
                                             double coord_noise_sigma, jeanie_corpus** out);
JEANIE_API jeanie_status jeanie_corpus_to_jsonl(const jeanie_corpus* corpus, char** out_jsonl);
JEANIE_API int jeanie_corpus_size(const jeanie_corpus* corpus);
JEANIE_API const jeanie_sequence* jeanie_corpus_get(const jeanie_corpus* corpus, int index);
JEANIE_API void jeanie_corpus_free(jeanie_corpus* corpus);

/* ---- camera geometry ---- */
JEANIE_API jeanie_status jeanie_camera_parse_json(const char* text, jeanie_camera** out);
JEANIE_API jeanie_status jeanie_camera_load(const char* path, jeanie_camera** out);
/* row-major 3x3 fundamental matrix of the rig */
JEANIE_API jeanie_status jeanie_camera_fundamental(const jeanie_camera* cam, double out[9]);
JEANIE_API void jeanie_camera_free(jeanie_camera* cam);

/* mode is "euler" or "camvpc"; camvpc requires a camera */
JEANIE_API jeanie_status jeanie_simulate_view(const jeanie_sequence* seq, double azimuth_deg,
                                              double altitude_deg, const char* mode,
                                              const jeanie_camera* cam_or_null,
                                              jeanie_sequence** out);

/* ---- feature extraction ---- */
/* expand_views != 0 produces the config's K x K' grid; otherwise the map is
 * single-view. The sequence is torso-centered and range-normalized first. */
JEANIE_API jeanie_status jeanie_encode(const jeanie_sequence* seq, const jeanie_config* cfg,
                                       const jeanie_camera* cam_or_null, int expand_views,
                                       jeanie_features** out);
JEANIE_API int jeanie_features_dim(const jeanie_features* f);
JEANIE_API int jeanie_features_grid_azimuth(const jeanie_features* f);
JEANIE_API int jeanie_features_grid_altitude(const jeanie_features* f);
JEANIE_API int jeanie_features_blocks(const jeanie_features* f);
JEANIE_API void jeanie_features_free(jeanie_features* f);

/* ---- alignment ---- */
/* method is "softdtw", "fvm" or "jeanie" */
JEANIE_API jeanie_status jeanie_align_features(const jeanie_features* query,
                                               const jeanie_features* support,
                                               const jeanie_config* cfg, const char* method,
                                               int want_grad, int want_path,
                                               jeanie_alignment** out);

/* d4 is a flat K x K' x tau x tau' tensor, ((k*Kp + kp)*tau + t)*taup + tp */
JEANIE_API jeanie_status jeanie_align_tensor(const double* d4, int K, int Kp, int tau, int taup,
                                             double gamma, int iota, const char* method,
                                             int want_grad, int want_path, jeanie_alignment** out);
JEANIE_API jeanie_status jeanie_brute_force(const double* d4, int K, int Kp, int tau, int taup,
                                            double gamma, int iota, double* out_value);

JEANIE_API double jeanie_alignment_distance(const jeanie_alignment* a);
/* gradient has the shape of the input tensor; cap is the buffer capacity */
JEANIE_API jeanie_status jeanie_alignment_gradient(const jeanie_alignment* a, double* buf,
                                                   size_t cap);
JEANIE_API int jeanie_alignment_path_length(const jeanie_alignment* a);
JEANIE_API jeanie_status jeanie_alignment_path_step(const jeanie_alignment* a, int index,
                                                    int out_kktt[4]);
JEANIE_API void jeanie_alignment_free(jeanie_alignment* a);

/* ---- episodic few-shot ---- */
/* Similarity loss over within-class (d+) and between-class (d-) distance
 * vectors with detached top-k targets. Gradient buffers may be NULL. */
JEANIE_API jeanie_status jeanie_episode_loss(const double* dplus, int n_plus, const double* dminus,
                                             int n_minus, int beta, int n_way, int z_shot,
                                             double* out_value, double* grad_plus,
                                             double* grad_minus);

/* Runs episode.episodes N-way Z-shot tasks; returns a canonical JSON report:
 * {"accuracy","ci95_low","ci95_high","config_hash","episodes","method",
 *  "n_way","z_shot","per_episode","run_id","wall_time_s"} */
JEANIE_API jeanie_status jeanie_episode_eval(const jeanie_corpus* corpus, const jeanie_config* cfg,
                                             const char* method, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* JEANIE_H_ */
