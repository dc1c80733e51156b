"""Services of cremona-lines, one subpackage per concern."""
