"""Text representation schemes: n-gram, subword, and semantic tokenization,
coordinate templates, and rule-based address parsing."""

from .address import DEFAULT_ABBREVIATIONS, AddressFields, load_abbreviations, parse_address
from .coords import coord_to_text, text_to_coord
from .gazetteer import Gazetteer, normalize_name, semantic_tag
from .ngram import ngram_tokenize
from .subword import UNK_TEXT, SubwordModel, subword_encode, subword_train
from .tokens import TOKEN_KINDS, Token, split_words

__all__ = [
    "AddressFields",
    "DEFAULT_ABBREVIATIONS",
    "Gazetteer",
    "SubwordModel",
    "TOKEN_KINDS",
    "Token",
    "UNK_TEXT",
    "coord_to_text",
    "load_abbreviations",
    "ngram_tokenize",
    "normalize_name",
    "parse_address",
    "semantic_tag",
    "split_words",
    "subword_encode",
    "subword_train",
    "text_to_coord",
]
