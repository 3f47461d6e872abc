
# stage index offsets added to the master seed
STAGE_INDEX = {"simulate": 0, "dataset": 1, "preprocess": 2, "train": 3}

# feature columns, in order, followed by the class label
FEATURE_COLUMNS = (
    "sumweights",
    "type",
    "module",
    "name",
    "attrname",
    "attrvalue",
    "value",
    "count",
    "mean",
    "stddev",
    "min",
    "max",
    "underflows",
    "overflows",
    "binedges",
    "binvalues",
)
LABEL_COLUMN = "label"
CSV_COLUMNS = FEATURE_COLUMNS + (LABEL_COLUMN,)

# removed by preprocessing: the columns that are null on every scalar row
SPARSE_COLUMNS = (
    "count",
    "sumweights",
    "mean",
    "stddev",
    "min",
    "max",
    "underflows",
    "overflows",
    "binedges",
    "binvalues",
)
CATEGORICAL_COLUMNS = ("type", "module", "name", "attrname", "attrvalue")

HISTOGRAM_BINS = 20

# output file names
DATASET_CSV = "dataset.csv"
TRAIN_CSV = "train.csv"
VAL_CSV = "val.csv"
TEST_CSV = "test.csv"
SCALER_JSON = "scaler.json"
CODEBOOKS_JSON = "codebooks.json"
METRICS_JSON = "metrics.json"
METRICS_TSV = "metrics.tsv"
LOG_DIR = "logs"
