"""Configuration, domain errors and document schemas."""
