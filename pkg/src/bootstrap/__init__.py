# src package 