from typing import Any

from jsonschema import Draft7Validator

from archrecon.schema.schema_node import SchemaNode


def validator_for(schema: SchemaNode) -> Draft7Validator:
    """Draft 7 validator for a loaded schema, built once per node."""
    validator = schema._validator
    if validator is None:
        validator = Draft7Validator(schema.to_document())
        schema._validator = validator
    return validator


def conforms(value: Any, schema: SchemaNode) -> bool:
    """True iff `value` satisfies every keyword present in `schema`."""
    return validator_for(schema).is_valid(value)
