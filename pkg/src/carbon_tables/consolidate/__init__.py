"""整合模块 - 决策树表头匹配、知识图谱、特征向量与查询。"""

from carbon_tables.consolidate.corpus import consolidate_corpus, merge_graphs
from carbon_tables.consolidate.errors import UnknownFilterField
from carbon_tables.consolidate.features import (
    encode_features,
    features_frame,
    features_to_csv,
    features_to_json,
)
from carbon_tables.consolidate.headers import ColumnMatch, DecisionTreeHeaderMatcher, HeaderMatcher
from carbon_tables.consolidate.models import (
    ConsolidationOptions,
    DocumentNode,
    FeatureVector,
    FomNode,
    KnowledgeGraph,
    MaterialNode,
    MeasurementRecord,
    Novelty,
    Provenance,
    SkipEntry,
    SkipReason,
)
from carbon_tables.consolidate.query import FILTER_FIELDS, query_records, records_frame
from carbon_tables.consolidate.serialize import (
    graph_from_json,
    graph_to_dict,
    graph_to_json,
    record_from_dict,
    record_to_dict,
)
from carbon_tables.consolidate.tables import TableOutcome, consolidate_table

__all__ = [
    "FILTER_FIELDS",
    "ColumnMatch",
    "ConsolidationOptions",
    "DecisionTreeHeaderMatcher",
    "DocumentNode",
    "FeatureVector",
    "FomNode",
    "HeaderMatcher",
    "KnowledgeGraph",
    "MaterialNode",
    "MeasurementRecord",
    "Novelty",
    "Provenance",
    "SkipEntry",
    "SkipReason",
    "TableOutcome",
    "UnknownFilterField",
    "consolidate_corpus",
    "consolidate_table",
    "encode_features",
    "features_frame",
    "features_to_csv",
    "features_to_json",
    "graph_from_json",
    "graph_to_dict",
    "graph_to_json",
    "merge_graphs",
    "query_records",
    "record_from_dict",
    "record_to_dict",
    "records_frame",
]
