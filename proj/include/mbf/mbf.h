/*
 * C interface of the memory-bounded Mondrian forest library.
 *
 * Every object is an opaque handle released by its matching *_free call.
 * Functions returning mbf_status leave a human-readable message for the
 * calling thread in mbf_last_error() when they fail.
 */
#ifndef MBF_H
#define MBF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MBF_BUILDING_LIBRARY)
#    define MBF_API __declspec(dllexport)
#  else
#    define MBF_API __declspec(dllimport)
#  endif
#else
#  define MBF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mbf_status {
	MBF_OK = 0,
	MBF_ERR_INVALID_ARGUMENT = 1, /* null handle, bad dimension, label out of range */
	MBF_ERR_CONFIG = 2,			  /* configuration rejected (e.g. memory below one node) */
	MBF_ERR_PARSE = 3,			  /* malformed input file */
	MBF_ERR_IO = 4,				  /* file could not be written */
	MBF_ERR_INTERNAL = 5		  /* broken invariant; the object must be discarded */
} mbf_status;

typedef enum mbf_leaf_strategy { MBF_LEAF_RANDOM = 0, MBF_LEAF_DEPTH = 1, MBF_LEAF_COUNT = 2 } mbf_leaf_strategy;
typedef enum mbf_tracker_kind { MBF_TRACKER_SLIDING = 0, MBF_TRACKER_FADING = 1 } mbf_tracker_kind;
typedef enum mbf_comparison_test {
	MBF_TEST_SUM_VAR = 0,
	MBF_TEST_T = 1,
	MBF_TEST_Z = 2,
	MBF_TEST_SUM_STD = 3
} mbf_comparison_test;
typedef enum mbf_mode {
	MBF_MODE_FIXED = 0,
	MBF_MODE_DYNAMIC = 1,
	MBF_MODE_SCHEDULED_ADD = 2,
	MBF_MODE_SCHEDULED_REMOVE = 3
} mbf_mode;

typedef struct mbf_dataset mbf_dataset;
typedef struct mbf_forest mbf_forest;
typedef struct mbf_run_result mbf_run_result;

typedef struct mbf_combination {
	mbf_leaf_strategy strategy;
	mbf_tracker_kind tracker;
	mbf_comparison_test test;
} mbf_combination;

typedef struct mbf_experiment_config {
	uint64_t memory_bytes;		  /* default 200000 */
	mbf_mode mode;				  /* default MBF_MODE_FIXED */
	uint32_t trees;				  /* fixed count or scheduled target; default 1 */
	mbf_combination dynamic;	  /* default count, fading, sum-std */
	double min_samples;			  /* effective samples before testing; default 30 */
	int reset_on_add;			  /* default 1 */
	uint32_t window_size;		  /* sliding trackers; default 200 */
	double fading_factor;		  /* fading trackers; default 0.995 */
	double eval_fading;			  /* F1 confusion matrix; default 0.99 */
	uint64_t seed;				  /* default 1 */
	uint32_t checkpoint_interval; /* points between checkpoint rows; default 100 */
	uint32_t remove_start;		  /* starting trees of scheduled removal; default 50 */
	uint32_t threads;			  /* workers for sweep/compare, 0 = all cores */
} mbf_experiment_config;

typedef struct mbf_rbf_config {
	uint32_t centroids;	 /* default 50 */
	uint32_t features;	 /* default 12 */
	uint32_t labels;	 /* default 33 */
	double drift_speed;	 /* default 0 */
	uint64_t seed;		 /* default 1 */
} mbf_rbf_config;

typedef struct mbf_train_report {
	uint32_t pre_label;
	uint32_t post_label;
	int pre_correct;
	int post_correct;
	int tree_added;
} mbf_train_report;

typedef struct mbf_checkpoint {
	uint64_t point_index;
	double f1;
	uint64_t tree_count;
	uint64_t pool_used;
	uint64_t max_depth;
} mbf_checkpoint;

typedef struct mbf_compare_row {
	mbf_combination combination;
	uint64_t memory_bytes;
	double f1;
	double fixed_optimal_f1;
	uint32_t fixed_optimal_trees;
	double ratio;
	uint64_t additions;
} mbf_compare_row;

MBF_API const char *mbf_last_error(void);
MBF_API const char *mbf_status_name(mbf_status status);
MBF_API const char *mbf_version(void);

MBF_API size_t mbf_node_footprint(size_t features, size_t labels);
/* Capacity in nodes for a byte budget; 0 when the budget is below one node. */
MBF_API size_t mbf_pool_capacity(uint64_t memory_bytes, size_t features, size_t labels);

MBF_API void mbf_experiment_config_init(mbf_experiment_config *config);
MBF_API void mbf_rbf_config_init(mbf_rbf_config *config);

/* Parses "count,fading,sum-std" style names. */
MBF_API mbf_status mbf_combination_parse(const char *text, mbf_combination *out);
/* Writes the canonical name; returns the length it needs (like snprintf). */
MBF_API size_t mbf_combination_name(mbf_combination combination, char *buffer, size_t size);
/* Fills up to `capacity` entries with the 24 combinations; returns 24. */
MBF_API size_t mbf_all_combinations(mbf_combination *out, size_t capacity);

/* ---- datasets ---- */
MBF_API mbf_status mbf_dataset_generate_rbf(const mbf_rbf_config *config, size_t n, mbf_dataset **out);
/* label_column < 0 counts from the end (-1 = last column). */
MBF_API mbf_status mbf_dataset_load_csv(const char *path, int label_column, int has_header, mbf_dataset **out);
/* Treats each point of `raw` as one sensor sample and windows them. */
MBF_API mbf_status mbf_dataset_window(const mbf_dataset *raw, size_t window_size, mbf_dataset **out);
MBF_API mbf_status mbf_dataset_inject_label_drift(mbf_dataset *dataset, uint32_t shift);
MBF_API mbf_status mbf_dataset_shuffle(mbf_dataset *dataset, uint64_t seed);
MBF_API size_t mbf_dataset_size(const mbf_dataset *dataset);
MBF_API size_t mbf_dataset_feature_count(const mbf_dataset *dataset);
MBF_API size_t mbf_dataset_label_count(const mbf_dataset *dataset);
MBF_API mbf_status mbf_dataset_point(const mbf_dataset *dataset, size_t index, double *features, size_t feature_count,
									 uint32_t *label);
MBF_API void mbf_dataset_free(mbf_dataset *dataset);

/* ---- forests ---- */
/* Fixed, dynamic or scheduled forest per config->mode (both scheduled modes
 * accept mbf_forest_add_tree / mbf_forest_remove_tree). */
MBF_API mbf_status mbf_forest_create(const mbf_experiment_config *config, size_t features, size_t labels,
									 mbf_forest **out);
MBF_API mbf_status mbf_forest_train(mbf_forest *forest, const double *x, size_t feature_count, uint32_t label,
									mbf_train_report *report);
MBF_API mbf_status mbf_forest_predict(const mbf_forest *forest, const double *x, size_t feature_count,
									  uint32_t *label);
/* Trims existing trees then appends an empty one. */
MBF_API mbf_status mbf_forest_add_tree(mbf_forest *forest);
MBF_API mbf_status mbf_forest_remove_tree(mbf_forest *forest);
MBF_API size_t mbf_forest_tree_count(const mbf_forest *forest);
MBF_API size_t mbf_forest_pool_used(const mbf_forest *forest);
MBF_API size_t mbf_forest_pool_capacity(const mbf_forest *forest);
MBF_API void mbf_forest_free(mbf_forest *forest);

/* ---- experiments ---- */
MBF_API mbf_status mbf_run_experiment(const mbf_dataset *dataset, const mbf_experiment_config *config,
									  mbf_run_result **out);
MBF_API const char *mbf_run_result_id(const mbf_run_result *result);
MBF_API double mbf_run_result_final_f1(const mbf_run_result *result);
MBF_API size_t mbf_run_result_tree_count(const mbf_run_result *result);
MBF_API size_t mbf_run_result_additions(const mbf_run_result *result);
MBF_API size_t mbf_run_result_capacity(const mbf_run_result *result);
MBF_API size_t mbf_run_result_checkpoint_count(const mbf_run_result *result);
MBF_API mbf_status mbf_run_result_checkpoint(const mbf_run_result *result, size_t index, mbf_checkpoint *out);
/* CSV: point_index,f1_fading,tree_count,pool_used,max_depth */
MBF_API mbf_status mbf_run_result_write_checkpoints(const mbf_run_result *result, const char *path);
/* CSV: config_id,final_f1,tree_count_final,additions */
MBF_API mbf_status mbf_write_summary(const mbf_run_result *const *results, size_t count, const char *path);
MBF_API void mbf_run_result_free(mbf_run_result *result);

/* One fixed run per count; results[i] receives a new handle per count. */
MBF_API mbf_status mbf_sweep_tree_count(const mbf_dataset *dataset, const mbf_experiment_config *base,
										const uint32_t *counts, size_t count_len, mbf_run_result **results,
										size_t *best_index);

/* rows must hold memory_len * combination_len entries. When runs is not
 * null it must hold memory_len * (count_len + combination_len) handles:
 * per memory, the fixed runs in count order then the dynamic runs. */
MBF_API mbf_status mbf_compare_dynamic_vs_fixed(const mbf_dataset *dataset, const mbf_experiment_config *base,
												const uint64_t *memories, size_t memory_len,
												const mbf_combination *combinations, size_t combination_len,
												const uint32_t *counts, size_t count_len, mbf_compare_row *rows,
												mbf_run_result **runs);
/* CSV: addition,tracker,test,memory_bytes,f1,fixed_optimal_f1,fixed_optimal_trees,ratio,additions */
MBF_API mbf_status mbf_write_compare(const mbf_compare_row *rows, size_t count, const char *path);

#ifdef __cplusplus
}
#endif

#endif
