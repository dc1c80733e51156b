"""cremona-lines: adjoints, log plurigenera and Cremona contractions of unions of lines."""
