from rescap.topics.lda import StaticLda
from rescap.topics.dynamic import DynamicTopicModel
from rescap.topics.selection import TopicCountSelector, TopicUsageProfile, select_num_topics
from rescap.topics.state import TopicModelState, doc_topic_distribution, top_words

__all__ = [
    "StaticLda",
    "DynamicTopicModel",
    "TopicCountSelector",
    "TopicUsageProfile",
    "select_num_topics",
    "TopicModelState",
    "doc_topic_distribution",
    "top_words",
]
