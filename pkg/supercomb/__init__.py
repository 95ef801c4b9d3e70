""" Desk-scale laboratory for selections into normally supercompact spaces """
