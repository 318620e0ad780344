"""stixpipe: extraction of STIX 2.1 entities and relationships from CTI report text."""

__version__ = "0.1.0"
